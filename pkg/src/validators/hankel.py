"""
Hankel positivity checks (Stieltjes moment problem)

A classical state has q_n (and, where they exist, gamma_n) equal to the
moments of a nonnegative measure on [0, inf). That holds iff the Hankel
matrices s_{m+n} and s_{m+n+1} are positive semidefinite at every order.
"""
import logging
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import eigvalsh, hankel

from src.core.logmath import apply_gauge, gauge_parameters
from src.models.distribution import FactorialMomentSequence, HankelPair, MomentSequence
from src.models.errors import WindowTooShort
from src.models.report import CheckName, WitnessReport
from src.validators.base_validator import BaseClassicalityCheck, BatteryConfig

logger = logging.getLogger(__name__)

AnySequence = Union[MomentSequence, FactorialMomentSequence]

MATRIX_NAMES = {"q": ("L", "L~"), "gamma": ("M", "M~")}


def _as_moments(seq: AnySequence) -> Tuple[MomentSequence, str]:
    if isinstance(seq, FactorialMomentSequence):
        return seq.to_moment_sequence(), "gamma"
    return seq, "q"


def build_hankel(seq: AnySequence, N: int, allow_unshifted_only: bool = False) -> HankelPair:
    """次数 N のハンケル行列の組をゲージ変換した列から構築

    The sequence is rescaled to s'_n = s_n c^n / a (first positive entry
    mapped to 1, largest entry exactly 1) before the matrices are filled.
    """
    moments, source = _as_moments(seq)
    end = moments.nmax
    if N < 0:
        raise ValueError("Hankel order must be nonnegative")
    needed = 2 * N + 1
    if needed > end and not (allow_unshifted_only and 2 * N <= end):
        raise WindowTooShort(needed, end, f"Hankel order {N}")

    top = min(needed, end)
    logs = moments.log_array()[: top + 1]
    log_a, log_c = gauge_parameters(logs)
    scaled = np.exp(apply_gauge(logs, log_a, log_c))

    unshifted = hankel(scaled[: N + 1], scaled[N: 2 * N + 1])
    shifted = None
    if needed <= end:
        shifted = hankel(scaled[1: N + 2], scaled[N + 1: 2 * N + 2])

    with np.errstate(over="ignore", under="ignore"):
        scale = (float(np.exp(log_a)), float(np.exp(log_c)))
    return HankelPair(
        order=N,
        unshifted=_as_tuple(unshifted),
        shifted=_as_tuple(shifted) if shifted is not None else None,
        scale=scale,
        log_scale=(log_a, log_c),
        source=source,
    )


def _as_tuple(matrix: np.ndarray) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in row) for row in matrix)


def equilibrate(matrix: np.ndarray) -> np.ndarray:
    """D A D（D = diag(A_ii^{-1/2})、対角が0の行は1）。合同変換なので半正定値性は不変"""
    diag = np.diag(matrix).copy()
    d = np.ones_like(diag)
    positive = diag > 0
    d[positive] = 1.0 / np.sqrt(diag[positive])
    return matrix * np.outer(d, d)


class PSDResult(BaseModel):
    """一つの行列の半正定値判定"""
    model_config = ConfigDict(frozen=True)

    is_psd: bool
    min_eigenvalue: float
    threshold: float
    margin: float


def psd_decision(matrix: np.ndarray, psd_tol: float) -> PSDResult:
    """平衡化した行列の最小固有値で半正定値性を判定"""
    eq = equilibrate(np.asarray(matrix, dtype=float))
    eigenvalues = eigvalsh(eq)
    lam_min = float(eigenvalues[0])
    threshold = -psd_tol * max(1.0, float(np.max(np.abs(eigenvalues))))

    diag = np.diag(eq)
    off = np.abs(eq - np.diag(diag))
    zero_rows = np.flatnonzero(diag <= 0)
    if zero_rows.size and np.any(off[zero_rows] > 0):
        # 対角0の行に非零成分があれば半正定値ではあり得ない
        worst = float(np.max(off[zero_rows]))
        margin = min(lam_min, -max(worst, np.finfo(float).tiny))
        return PSDResult(is_psd=False, min_eigenvalue=lam_min, threshold=threshold, margin=margin)

    return PSDResult(is_psd=lam_min >= threshold, min_eigenvalue=lam_min, threshold=threshold,
                     margin=lam_min)


def _leading_matrices(
    seq: AnySequence, n_l: int, n_lt: int
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """次数 n_l の L と次数 n_lt の L~（n_lt < 0 なら None）。小さい次数は先頭の小行列"""
    top = max(n_l, n_lt)
    pair = build_hankel(seq, top, allow_unshifted_only=n_lt < top)
    full_l = pair.unshifted_matrix()[: n_l + 1, : n_l + 1]
    if n_lt < 0:
        return full_l, None
    shifted = pair.shifted_matrix()
    if shifted is None:
        shifted = build_hankel(seq, n_lt).shifted_matrix()
    return full_l, shifted[: n_lt + 1, : n_lt + 1]


class HankelPSDCheck(BaseClassicalityCheck):
    """L, L~（または M, M~）の半正定値性"""

    name = CheckName.HANKEL_Q

    def run(self, pair: HankelPair) -> WitnessReport:
        self.reset()
        self.name = CheckName.HANKEL_GAMMA if pair.source == "gamma" else CheckName.HANKEL_Q
        names = MATRIX_NAMES.get(pair.source, MATRIX_NAMES["q"])
        self._check_matrix(pair.unshifted_matrix(), pair.order, names[0])
        shifted = pair.shifted_matrix()
        if shifted is not None and not self.config.hamburger_only:
            self._check_matrix(shifted, pair.order, names[1])
        end = 2 * pair.order + (1 if shifted is not None else 0)
        self.record_coverage(0, end, max_order=pair.order)
        return self.generate_report()

    def scan(self, seq: AnySequence) -> WitnessReport:
        """次数 0 から上限まで走査し、行列ごとに最初に破れる N を報告"""
        self.reset()
        moments, source = _as_moments(seq)
        self.name = CheckName.HANKEL_GAMMA if source == "gamma" else CheckName.HANKEL_Q
        names = MATRIX_NAMES[source]
        n_l, n_lt = self.config.hankel_orders(moments.nmax)
        if self.config.hamburger_only:
            n_lt = -1
        full_l, full_lt = _leading_matrices(seq, n_l, n_lt)

        matrices = [(names[0], full_l, n_l)]
        if full_lt is not None:
            matrices.append((names[1], full_lt, n_lt))
        for label, full, limit in matrices:
            for N in range(limit + 1):
                if self._check_matrix(full[: N + 1, : N + 1], N, label):
                    logger.debug("%s fails positivity first at N=%d", label, N)
                    break
        logger.debug("Hankel scan on %s reached N=%d (shifted N=%d)", source, n_l, n_lt)
        end = min(moments.nmax, max(2 * n_l, 2 * n_lt + 1))
        self.record_coverage(0, end, max_order=n_l)
        return self.generate_report()

    def _check_matrix(self, matrix: np.ndarray, order: int, label: str) -> bool:
        result = psd_decision(matrix, self.config.psd_tol)
        if result.is_psd:
            return False
        self.add_witness((order,), result.min_eigenvalue, 0.0, result.margin,
                         detail=f"{label} min eigenvalue")
        return True


class HankelProfileEntry(BaseModel):
    """次数 N における最小固有値（平衡化後）"""
    model_config = ConfigDict(frozen=True)

    order: int
    unshifted_min: float
    shifted_min: Optional[float] = None


def hankel_profile(seq: AnySequence, max_order: Optional[int] = None) -> List[HankelProfileEntry]:
    """N ごとの最小固有値の列（次数に対して単調非増加）"""
    moments, _ = _as_moments(seq)
    n_l = moments.nmax // 2
    if max_order is not None:
        n_l = min(n_l, max_order)
    n_lt = min(n_l, (moments.nmax - 1) // 2)
    full_l, full_lt = _leading_matrices(seq, n_l, n_lt)
    full_l = equilibrate(full_l)
    if full_lt is not None:
        full_lt = equilibrate(full_lt)
    entries = []
    for N in range(n_l + 1):
        lam = float(eigvalsh(full_l[: N + 1, : N + 1])[0])
        lam_t = None
        if full_lt is not None and N <= n_lt:
            lam_t = float(eigvalsh(full_lt[: N + 1, : N + 1])[0])
        entries.append(HankelProfileEntry(order=N, unshifted_min=lam, shifted_min=lam_t))
    return entries


# 便利関数
def check_hankel_psd(pair: HankelPair, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """ハンケル行列の組の半正定値検査"""
    return HankelPSDCheck(cfg).run(pair)


def scan_hankel(seq: AnySequence, cfg: Optional[BatteryConfig] = None) -> WitnessReport:
    """すべての検査可能な次数でのハンケル検査"""
    return HankelPSDCheck(cfg).scan(seq)
