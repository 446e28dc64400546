"""
Local necessary conditions for classicality

Every check here looks at a few neighbouring entries of p_n, q_n, x_n or
gamma_n and records each inequality that fails beyond tolerance.
"""
import logging
import math
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from src.core.transforms import mandel_q
from src.models.distribution import (
    FactorialMomentSequence,
    MomentSequence,
    PhotonDistribution,
    XnSequence,
)
from src.models.errors import WindowTooShort
from src.models.report import CheckName, WitnessReport
from src.validators.base_validator import BaseClassicalityCheck, BatteryConfig

logger = logging.getLogger(__name__)

X_ROUNDING = 1e-12


class ZerosCheck(BaseClassicalityCheck):
    """真空以外の古典状態は p_n = 0 を持たない"""

    name = CheckName.ZEROS

    def run(self, dist: PhotonDistribution) -> WitnessReport:
        self.reset()
        p = dist.as_array()
        positive = dist.positive_mask()
        zeros = [n for n in range(p.size) if not positive[n]]
        excited = [m for m in range(1, p.size) if positive[m]]
        if zeros and excited:
            lhs = float(max(p[n] for n in zeros))
            rhs = float(max(p[m] for m in excited))
            self.add_witness(zeros, lhs, rhs, lhs - rhs, detail="p_n = 0 in a non-vacuum state")
        self.record_coverage(0, dist.nmax)
        return self.generate_report()


class FirstOrderCheck(BaseClassicalityCheck):
    """s_n s_{n+2} >= s_{n+1}^2（q_n にも γ_n にも使う）"""

    name = CheckName.FIRST_ORDER

    def __init__(self, config: Optional[BatteryConfig] = None, name: CheckName = CheckName.FIRST_ORDER):
        super().__init__(config)
        self.name = name

    def run(self, seq: MomentSequence) -> WitnessReport:
        self.reset()
        if seq.nmax < 2:
            raise WindowTooShort(2, seq.nmax, self.name.value)
        logs = seq.log_array()
        signs = np.asarray(seq.signs, dtype=bool)
        log_threshold = math.log1p(-self.config.psd_tol)
        for n in range(seq.nmax - 1):
            if not signs[n + 1]:
                continue
            log_rhs = 2.0 * logs[n + 1]
            if not (signs[n] and signs[n + 2]):
                self.add_log_witness((n, n + 1, n + 2), -math.inf, log_rhs, -1.0)
                continue
            log_lhs = logs[n] + logs[n + 2]
            log_ratio = log_lhs - log_rhs
            if log_ratio < log_threshold:
                self.add_log_witness((n, n + 1, n + 2), log_lhs, log_rhs, math.expm1(log_ratio))
        self.record_coverage(0, seq.nmax)
        return self.generate_report()


class SecondOrderCheck(BaseClassicalityCheck):
    """(x_n - 1)(x_{n+2} - 1) >= ((x_{n+1} - 1) / x_{n+1})^2"""

    name = CheckName.SECOND_ORDER

    def run(self, x: XnSequence) -> WitnessReport:
        self.reset()
        if len(x) < 3:
            raise WindowTooShort(4, len(x) + 1, "second-order conditions")
        tol = self.config.psd_tol
        checked = []
        for n in range(len(x) - 2):
            if not (x.defined[n] and x.defined[n + 1] and x.defined[n + 2]):
                continue
            checked.append(n)
            x1 = x.values[n + 1]
            lhs = x.deviation(n) * x.deviation(n + 2)
            rhs = (x.deviation(n + 1) / x1) ** 2
            margin = lhs - rhs
            if margin < -tol * max(1.0, abs(lhs), abs(rhs)):
                self.add_witness((n, n + 1, n + 2), lhs, rhs, margin, detail="x-indices")
        if checked:
            self.record_coverage(checked[0], checked[-1] + 4)
        else:
            logger.debug("second-order conditions: no three consecutive defined x_n")
            self.record_coverage(0, -1)
        return self.generate_report()


class LocalPoissonianCheck(BaseClassicalityCheck):
    """局所ポアソン性の剛性: 飽和した x_n と非飽和の x_m は共存できない

    Every boundary between a saturated x_{n0} (|x_{n0} - 1| <= saturation_tol)
    and a defined, non-saturated neighbour m = n0 ± 1 is tested with the
    second-order condition centred on m:
    (x_{n0} - 1)(x_o - 1) >= ((x_m - 1)/x_m)^2, o = 2m - n0.
    When x_o lies outside the window the left side is only known for an
    exactly saturated x_{n0} (to within rounding), where it is 0 for any
    finite x_o.
    """

    name = CheckName.LOCAL_POISSONIAN

    def run(self, x: XnSequence) -> WitnessReport:
        self.reset()
        sat_tol = self.config.saturation_tol
        saturated = [x.is_defined(n) and abs(x.deviation(n)) <= sat_tol for n in range(len(x))]
        boundaries = 0
        seen: Set[Tuple[int, ...]] = set()
        for n0 in range(len(x)):
            if not saturated[n0]:
                continue
            for step in (-1, 1):
                m, o = n0 + step, n0 + 2 * step
                if not x.is_defined(m) or saturated[m]:
                    continue
                boundaries += 1
                self._check_boundary(x, n0, m, o, seen)
        if boundaries == 0 and any(saturated) and any(
            x.is_defined(n) and not saturated[n] for n in range(len(x))
        ):
            logger.debug("mixed saturation without adjacent defined x_n; no certificate in window")
        self.record_coverage(0, len(x) + 1)
        return self.generate_report()

    def _check_boundary(self, x: XnSequence, n0: int, m: int, o: int, seen: Set[Tuple[int, ...]]) -> None:
        required = (x.deviation(m) / x.values[m]) ** 2
        if x.is_defined(o):
            spread = abs(x.deviation(o))
            lhs = x.deviation(n0) * x.deviation(o)
            indices = tuple(sorted((n0, m, o)))
        elif abs(x.deviation(n0)) <= X_ROUNDING:
            spread, lhs = 0.0, 0.0
            indices = tuple(sorted((n0, m)))
        else:
            return
        # x_n は対数差から作るので |x_n - 1| に X_ROUNDING 程度の丸めが乗る
        slack = self.config.psd_tol * max(abs(lhs), required) + X_ROUNDING * spread
        if required - lhs > slack and indices not in seen:
            seen.add(indices)
            self.add_witness(indices, lhs, required, lhs - required,
                             detail=f"x_{n0} saturated, x_{m} not")


def _interior_maxima(log_values: Sequence[float], rel_tol: float) -> List[Tuple[int, int]]:
    """内部の狭義極大（平坦部を含む）を (開始, 終了) で返す"""
    logs = np.asarray(log_values, dtype=float)
    eps = math.log1p(rel_tol)

    def same(a: float, b: float) -> bool:
        return (a == -math.inf and b == -math.inf) or abs(a - b) <= eps

    runs: List[Tuple[int, int]] = []
    start = 0
    for n in range(1, logs.size + 1):
        if n == logs.size or not same(logs[n], logs[n - 1]):
            runs.append((start, n - 1))
            start = n

    maxima = []
    for k in range(1, len(runs) - 1):
        left, (s, e), right = runs[k - 1], runs[k], runs[k + 1]
        level = logs[s]
        if level > logs[left[1]] + eps and level > logs[right[0]] + eps:
            maxima.append((s, e))
    return maxima


class OscillationQCheck(BaseClassicalityCheck):
    """古典状態の q_n は内部に極大を持たない"""

    name = CheckName.OSCILLATION_Q

    def run(self, q: MomentSequence) -> WitnessReport:
        self.reset()
        logs = q.log_array()
        for start, end in _interior_maxima(logs, self.config.psd_tol):
            neighbour = max(logs[start - 1], logs[end + 1])
            peak = logs[start]
            margin = math.expm1(neighbour - peak) if math.isfinite(neighbour) else -1.0
            self.add_log_witness((start - 1, *range(start, end + 1), end + 1), neighbour, peak, margin,
                                 detail="interior maximum of q_n")
        self.record_coverage(0, q.nmax)
        return self.generate_report()


class FirstOrderPFormCheck(BaseClassicalityCheck):
    """p_n p_{n+2} >= (n+1)/(n+2) p_{n+1}^2"""

    name = CheckName.FIRST_ORDER

    def run(self, dist: PhotonDistribution) -> WitnessReport:
        self.reset()
        if dist.nmax < 2:
            raise WindowTooShort(2, dist.nmax, "first-order conditions")
        positive = dist.positive_mask()
        logs = np.where(positive, dist.log_array(), -math.inf)
        log_threshold = math.log1p(-self.config.psd_tol)
        for n in range(dist.nmax - 1):
            if not positive[n + 1]:
                continue
            log_rhs = math.log(n + 1) - math.log(n + 2) + 2.0 * logs[n + 1]
            if not (positive[n] and positive[n + 2]):
                self.add_log_witness((n, n + 1, n + 2), -math.inf, log_rhs, -1.0, detail="p-form")
                continue
            log_lhs = logs[n] + logs[n + 2]
            if log_lhs - log_rhs < log_threshold:
                self.add_log_witness((n, n + 1, n + 2), log_lhs, log_rhs,
                                     math.expm1(log_lhs - log_rhs), detail="p-form")
        self.record_coverage(0, dist.nmax)
        return self.generate_report()


class SubPoissonianCheck(BaseClassicalityCheck):
    """Mandel の Q >= 0"""

    name = CheckName.SUB_POISSONIAN

    def run(self, gamma: FactorialMomentSequence) -> WitnessReport:
        self.reset()
        if gamma.finite_through < 2:
            raise WindowTooShort(2, gamma.finite_through, "Mandel Q")
        g0, g1, g2 = gamma.values[:3]
        if g0 > 0 and g1 > 0:
            q = mandel_q(gamma)
            if q < -self.config.psd_tol:
                self.add_witness((0, 1, 2), g0 * g2, g1 * g1, q, detail="Mandel Q < 0")
        self.record_coverage(0, 2)
        return self.generate_report()


# 便利関数
def check_zeros(dist: PhotonDistribution, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """ゼロ検査"""
    return ZerosCheck(cfg).run(dist)


def check_first_order(q: MomentSequence, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """一次の局所条件 q_n q_{n+2} >= q_{n+1}^2"""
    return FirstOrderCheck(cfg).run(q)


def first_order_p_form(dist: PhotonDistribution, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """一次の局所条件を p_n のまま評価"""
    return FirstOrderPFormCheck(cfg).run(dist)


def check_second_order(x: XnSequence, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """二次の局所条件"""
    return SecondOrderCheck(cfg).run(x)


def check_local_poissonian(x: XnSequence, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """局所ポアソン性の剛性"""
    return LocalPoissonianCheck(cfg).run(x)


def check_oscillation_q(q: MomentSequence, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """q_n の振動（内部極大）"""
    return OscillationQCheck(cfg).run(q)


def detect_oscillation_p(dist: PhotonDistribution, rel_tol: float = 1e-9) -> List[int]:
    """p_n の内部極大の位置（診断用、判定には使わない）"""
    logs = np.where(dist.positive_mask(), dist.log_array(), -math.inf)
    return [start for start, _ in _interior_maxima(logs, rel_tol)]


def check_factorial_first_order(
    gamma: FactorialMomentSequence,
    cfg: Optional[BatteryConfig] = None,
) -> WitnessReport:
    """γ_k γ_{k+2} >= γ_{k+1}^2"""
    return FirstOrderCheck(cfg, name=CheckName.FACTORIAL_FIRST_ORDER).run(gamma.to_moment_sequence())


def check_sub_poissonian(
    gamma: FactorialMomentSequence,
    cfg: Optional[BatteryConfig] = None,
) -> WitnessReport:
    """準ポアソン性（Mandel Q < 0）"""
    return SubPoissonianCheck(cfg).run(gamma)

