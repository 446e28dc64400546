"""
Witness report models
"""
from enum import Enum
from typing import Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Verdict(str, Enum):
    """判定結果（有限窓では古典性は証明できないため CLASSICAL は存在しない）"""
    NONCLASSICAL = "NONCLASSICAL"
    NO_VIOLATION_FOUND = "NO_VIOLATION_FOUND"


class CheckName(str, Enum):
    """検査名（定義順がバッテリーの実行順・レポートの並び順）"""
    ZEROS = "zeros"
    FIRST_ORDER = "first_order"
    SECOND_ORDER = "second_order"
    LOCAL_POISSONIAN = "local_poissonian"
    OSCILLATION_Q = "oscillation_q"
    HANKEL_Q = "hankel_q"
    FACTORIAL_FIRST_ORDER = "factorial_first_order"
    SUB_POISSONIAN = "sub_poissonian"
    HANKEL_GAMMA = "hankel_gamma"

    @property
    def rank(self) -> int:
        return list(CheckName).index(self)


FACTORIAL_CHECKS = frozenset(
    {CheckName.FACTORIAL_FIRST_ORDER, CheckName.SUB_POISSONIAN, CheckName.HANKEL_GAMMA}
)


class Witness(BaseModel):
    """破れた不等式 lhs >= rhs の具体例（margin < 0）"""
    model_config = ConfigDict(frozen=True)

    check: CheckName
    indices: Tuple[int, ...]
    lhs: float
    rhs: float
    margin: float = Field(lt=0.0)
    log_scale: float = 0.0
    detail: str = ""

    def sort_key(self) -> Tuple[int, Tuple[int, ...], str]:
        return (self.check.rank, self.indices, self.detail)


class CheckCoverage(BaseModel):
    """実行した検査と実際に調べた窓"""
    model_config = ConfigDict(frozen=True)

    check: CheckName
    window: Tuple[int, int]
    max_order: Optional[int] = None

    @model_validator(mode="after")
    def _check_window(self) -> "CheckCoverage":
        start, end = self.window
        if start < 0 or end < start - 1:
            raise ValueError(f"invalid window {self.window}")
        return self


class WitnessReport(BaseModel):
    """判定レポート"""
    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    witnesses: Tuple[Witness, ...] = ()
    tests_run: Tuple[CheckCoverage, ...] = ()
    tolerance_used: float

    @model_validator(mode="after")
    def _check_consistency(self) -> "WitnessReport":
        expected = Verdict.NONCLASSICAL if self.witnesses else Verdict.NO_VIOLATION_FOUND
        if self.verdict != expected:
            raise ValueError(
                f"verdict {self.verdict.value} is inconsistent with {len(self.witnesses)} witnesses"
            )
        return self

    @classmethod
    def from_checks(
        cls,
        witnesses: Iterable[Witness],
        coverage: Iterable[CheckCoverage],
        tolerance: float,
    ) -> "WitnessReport":
        """証拠と実行記録から判定を導いてレポートを構築"""
        ordered = tuple(sorted(witnesses, key=lambda w: w.sort_key()))
        runs = tuple(sorted(coverage, key=lambda c: c.check.rank))
        verdict = Verdict.NONCLASSICAL if ordered else Verdict.NO_VIOLATION_FOUND
        return cls(verdict=verdict, witnesses=ordered, tests_run=runs, tolerance_used=tolerance)

    @classmethod
    def merge(cls, reports: Iterable["WitnessReport"]) -> "WitnessReport":
        """複数レポートを統合（順序に依存しない）"""
        reports = list(reports)
        if not reports:
            raise ValueError("nothing to merge")
        witnesses: List[Witness] = []
        coverage: List[CheckCoverage] = []
        for report in reports:
            witnesses.extend(report.witnesses)
            coverage.extend(report.tests_run)
        tolerance = max(report.tolerance_used for report in reports)
        return cls.from_checks(witnesses, coverage, tolerance)

    @property
    def is_nonclassical(self) -> bool:
        return self.verdict == Verdict.NONCLASSICAL

    def witnesses_for(self, check: CheckName) -> List[Witness]:
        return [w for w in self.witnesses if w.check == check]

    def coverage_for(self, check: CheckName) -> Optional[CheckCoverage]:
        for run in self.tests_run:
            if run.check == check:
                return run
        return None

    def witness_indices(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """(検査名, 添字) の一覧。ゲージ不変性の比較に使う"""
        return [(w.check.value, w.indices) for w in self.witnesses]
