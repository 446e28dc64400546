"""
Classicality battery: runs every enabled check and merges the witnesses
"""
import logging
from typing import Dict, List, Optional

from src.core.transforms import p_to_gamma, p_to_q, q_to_x
from src.models.distribution import FactorialMomentSequence, MomentSequence, PhotonDistribution
from src.models.errors import DivergentTail, WindowTooShort
from src.models.report import FACTORIAL_CHECKS, CheckName, WitnessReport
from src.validators.base_validator import BatteryConfig
from src.validators.hankel import HankelPSDCheck
from src.validators.local_conditions import (
    FirstOrderCheck,
    LocalPoissonianCheck,
    OscillationQCheck,
    SecondOrderCheck,
    SubPoissonianCheck,
    ZerosCheck,
)

logger = logging.getLogger(__name__)


# 検査ごとの説明と参照する列
CHECK_DESCRIPTIONS: Dict[CheckName, str] = {
    CheckName.ZEROS: "p_n = 0 (真空以外)",
    CheckName.FIRST_ORDER: "q_n q_{n+2} >= q_{n+1}^2",
    CheckName.SECOND_ORDER: "(x_n-1)(x_{n+2}-1) >= ((x_{n+1}-1)/x_{n+1})^2",
    CheckName.LOCAL_POISSONIAN: "局所ポアソン性の剛性",
    CheckName.OSCILLATION_Q: "q_n の内部極大",
    CheckName.HANKEL_Q: "L, L~ >= 0",
    CheckName.FACTORIAL_FIRST_ORDER: "γ_n γ_{n+2} >= γ_{n+1}^2",
    CheckName.SUB_POISSONIAN: "Mandel Q >= 0",
    CheckName.HANKEL_GAMMA: "M, M~ >= 0",
}

# 各検査が必要とする最小の窓終端
MIN_WINDOW_END: Dict[CheckName, int] = {
    CheckName.ZEROS: 0,
    CheckName.FIRST_ORDER: 2,
    CheckName.SECOND_ORDER: 4,
    CheckName.LOCAL_POISSONIAN: 2,
    CheckName.OSCILLATION_Q: 0,
    CheckName.HANKEL_Q: 0,
    CheckName.FACTORIAL_FIRST_ORDER: 2,
    CheckName.SUB_POISSONIAN: 2,
    CheckName.HANKEL_GAMMA: 0,
}


class ClassicalityBattery:
    """検査バッテリーの実行を管理するクラス"""

    def __init__(self, config: Optional[BatteryConfig] = None):
        self.config = config or BatteryConfig()

    def get_available_checks(self) -> list:
        """利用可能な検査のリスト"""
        return [
            {
                "name": check.value,
                "condition": CHECK_DESCRIPTIONS[check],
                "min_window_end": MIN_WINDOW_END[check],
                "enabled": self.config.is_enabled(check),
                "factorial": check in FACTORIAL_CHECKS,
            }
            for check in CheckName
        ]

    def run(
        self,
        dist: PhotonDistribution,
        moments: Optional[MomentSequence] = None,
    ) -> WitnessReport:
        """分布に対して有効な検査をすべて実行"""
        cfg = self.config
        q = moments if moments is not None else p_to_q(dist)
        end = q.nmax
        reports: List[WitnessReport] = []

        def enabled(check: CheckName) -> bool:
            if not cfg.is_enabled(check):
                return False
            if end < MIN_WINDOW_END[check]:
                logger.debug("skipping %s: window ends at %d", check.value, end)
                return False
            return True

        if enabled(CheckName.ZEROS):
            reports.append(ZerosCheck(cfg).run(dist))
        if enabled(CheckName.FIRST_ORDER):
            reports.append(FirstOrderCheck(cfg).run(q))

        x = q_to_x(q) if end >= 2 else None
        if enabled(CheckName.SECOND_ORDER):
            reports.append(SecondOrderCheck(cfg).run(x))
        if enabled(CheckName.LOCAL_POISSONIAN):
            reports.append(LocalPoissonianCheck(cfg).run(x))
        if enabled(CheckName.OSCILLATION_Q):
            reports.append(OscillationQCheck(cfg).run(q))
        if enabled(CheckName.HANKEL_Q):
            reports.append(HankelPSDCheck(cfg).scan(q))

        if any(cfg.is_enabled(check) for check in FACTORIAL_CHECKS):
            K = cfg.max_factorial_order if cfg.max_factorial_order is not None else dist.nmax
            try:
                gamma = p_to_gamma(dist, K, tail_tol=cfg.tail_tol)
            except (DivergentTail, WindowTooShort) as e:
                logger.warning("factorial moments unavailable: %s", e)
            else:
                reports.extend(self._factorial_reports(gamma))

        report = self._merge(reports, end)
        logger.debug("battery finished: %s with %d witnesses", report.verdict.value, len(report.witnesses))
        return report

    def run_factorial(self, gamma: FactorialMomentSequence) -> WitnessReport:
        """階乗モーメントに対する検査（一次条件、Mandel Q、M, M~）"""
        return self._merge(self._factorial_reports(gamma), gamma.finite_through)

    def _factorial_reports(self, gamma: FactorialMomentSequence) -> List[WitnessReport]:
        cfg = self.config
        end = gamma.finite_through
        reports: List[WitnessReport] = []
        checks = cfg.enabled_checks & FACTORIAL_CHECKS or FACTORIAL_CHECKS
        for check in sorted(checks, key=lambda c: c.rank):
            if end < MIN_WINDOW_END[check]:
                logger.debug("skipping %s: gamma_n reliable only through %d", check.value, end)
                continue
            if check == CheckName.FACTORIAL_FIRST_ORDER:
                reports.append(
                    FirstOrderCheck(cfg, name=CheckName.FACTORIAL_FIRST_ORDER).run(gamma.to_moment_sequence())
                )
            elif check == CheckName.SUB_POISSONIAN:
                reports.append(SubPoissonianCheck(cfg).run(gamma))
            elif check == CheckName.HANKEL_GAMMA:
                reports.append(HankelPSDCheck(cfg).scan(gamma))
        return reports

    def _merge(self, reports: List[WitnessReport], end: int) -> WitnessReport:
        if not reports:
            required = min((MIN_WINDOW_END[c] for c in self.config.enabled_checks), default=0)
            raise WindowTooShort(required, end, "enabled checks")
        return WitnessReport.merge(reports)


# 便利関数
def run_battery(
    dist: PhotonDistribution,
    cfg: Optional[BatteryConfig] = None,
    moments: Optional[MomentSequence] = None,
) -> WitnessReport:
    """分布に対してバッテリー全体を実行"""
    return ClassicalityBattery(cfg).run(dist, moments)


def run_factorial_battery(
    gamma: FactorialMomentSequence,
    cfg: Optional[BatteryConfig] = None,
) -> WitnessReport:
    """階乗モーメント列に対する検査"""
    return ClassicalityBattery(cfg).run_factorial(gamma)
