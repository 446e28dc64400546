"""
Base framework for classicality checks
"""
from abc import ABC, abstractmethod
from typing import Any, FrozenSet, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from src.core.logmath import linear_or_scaled
from src.models.report import (
    FACTORIAL_CHECKS,
    CheckCoverage,
    CheckName,
    Witness,
    WitnessReport,
)

DEFAULT_CHECKS: FrozenSet[CheckName] = frozenset(set(CheckName) - FACTORIAL_CHECKS)


class BatteryConfig(BaseModel):
    """検査バッテリーの設定"""
    model_config = ConfigDict(frozen=True)

    psd_tol: float = Field(default=1e-9, gt=0.0)
    saturation_tol: float = Field(default=1e-6, gt=0.0)
    max_hankel_order: int = Field(default=50, ge=0)
    enabled_checks: FrozenSet[CheckName] = DEFAULT_CHECKS
    hamburger_only: bool = False
    tail_tol: float = Field(default=1e-10, gt=0.0)
    max_factorial_order: Optional[int] = Field(default=None, ge=0)

    @classmethod
    def from_settings(cls, settings: Any = None, **overrides: Any) -> "BatteryConfig":
        """設定ファイルの既定値から構築（引数で上書き可能）"""
        if settings is None:
            from src.config.settings import get_settings
            settings = get_settings()
        values = {
            "psd_tol": settings.tolerances.psd_tol,
            "saturation_tol": settings.tolerances.saturation_tol,
            "tail_tol": settings.tolerances.tail_tol,
            "max_hankel_order": settings.battery.max_hankel_order,
            "enabled_checks": frozenset(settings.battery.enabled_checks),
            "hamburger_only": settings.battery.hamburger_only,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def is_enabled(self, check: CheckName) -> bool:
        return check in self.enabled_checks

    def hankel_orders(self, end: int) -> Tuple[int, int]:
        """窓の終端 end で検査できる (L の最大次数, L~ の最大次数)。L~ が作れなければ -1"""
        return min(self.max_hankel_order, end // 2), min(self.max_hankel_order, (end - 1) // 2)


class BaseClassicalityCheck(ABC):
    """古典性の必要条件検査の基底クラス"""

    name: CheckName

    def __init__(self, config: Optional[BatteryConfig] = None):
        self.config = config or BatteryConfig()
        self.witnesses: List[Witness] = []
        self.coverage: List[CheckCoverage] = []

    @abstractmethod
    def run(self, data: Any) -> WitnessReport:
        """検査を実行してレポートを返す"""
        pass

    def add_witness(
        self,
        indices: Sequence[int],
        lhs: float,
        rhs: float,
        margin: float,
        log_scale: float = 0.0,
        detail: str = "",
    ) -> None:
        """破れた不等式 lhs >= rhs を記録"""
        self.witnesses.append(
            Witness(
                check=self.name,
                indices=tuple(int(i) for i in indices),
                lhs=lhs,
                rhs=rhs,
                margin=margin,
                log_scale=log_scale,
                detail=detail,
            )
        )

    def add_log_witness(
        self,
        indices: Sequence[int],
        log_lhs: float,
        log_rhs: float,
        margin: float,
        detail: str = "",
    ) -> None:
        """対数で与えた両辺を実数に戻して記録"""
        lhs, rhs, log_scale = linear_or_scaled(log_lhs, log_rhs)
        self.add_witness(indices, lhs, rhs, margin, log_scale, detail)

    def record_coverage(self, start: int, end: int, max_order: Optional[int] = None) -> None:
        self.coverage.append(CheckCoverage(check=self.name, window=(start, end), max_order=max_order))

    def generate_report(self) -> WitnessReport:
        """レポートを生成"""
        return WitnessReport.from_checks(self.witnesses, self.coverage, self.config.psd_tol)

    def reset(self) -> None:
        """結果をリセット"""
        self.witnesses.clear()
        self.coverage.clear()
