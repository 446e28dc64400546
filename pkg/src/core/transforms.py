"""
Conversions between p_n, q_n, x_n and factorial moments gamma_n
"""
import logging
import math
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from src.core.logmath import LOG_FLOAT_MAX, NEG_INF, compensated_log_sum, log_factorial
from src.models.distribution import (
    FactorialMomentSequence,
    MomentSequence,
    PhotonDistribution,
    XnSequence,
)
from src.models.errors import DivergentTail, WindowTooShort

logger = logging.getLogger(__name__)

DEFAULT_TAIL_TOL = 1e-10


def p_to_q(dist: PhotonDistribution) -> MomentSequence:
    """q_n = n! p_n を対数領域で計算（ゼロ扱いの p_n は符号0）"""
    log_p = dist.log_array()
    n = np.arange(log_p.size)
    positive = dist.positive_mask()
    logs = np.full(log_p.size, NEG_INF)
    logs[positive] = log_p[positive] + log_factorial(n[positive])
    return MomentSequence(
        signs=tuple(int(s) for s in positive),
        log_values=tuple(float(v) for v in logs),
    )


def q_to_p(q: MomentSequence) -> Tuple[float, ...]:
    """p_n = q_n / n!"""
    logs = q.log_array()
    n = np.arange(logs.size)
    with np.errstate(over="ignore"):
        p = np.exp(logs - log_factorial(n))
    return tuple(float(v) for v in p)


def log_x(q: MomentSequence) -> Tuple[np.ndarray, np.ndarray]:
    """log x_n と定義マスク（q_n, q_{n+1}, q_{n+2} がすべて正の所のみ定義）"""
    if q.nmax < 2:
        raise WindowTooShort(2, q.nmax, "x_n")
    logs = q.log_array()
    signs = np.asarray(q.signs, dtype=bool)
    defined = signs[:-2] & signs[1:-1] & signs[2:]
    logx = np.full(defined.size, np.nan)
    logx[defined] = logs[:-2][defined] + logs[2:][defined] - 2.0 * logs[1:-1][defined]
    return logx, defined


def q_to_x(q: MomentSequence) -> XnSequence:
    """x_n = q_n q_{n+2} / q_{n+1}^2"""
    logx, defined = log_x(q)
    # 極端な比は倍精度の上限で頭打ち
    values = np.where(defined, np.exp(np.minimum(np.nan_to_num(logx, nan=0.0), LOG_FLOAT_MAX)), np.nan)
    return XnSequence(
        values=tuple(float(v) for v in values),
        defined=tuple(bool(d) for d in defined),
    )


def p_to_gamma(
    dist: PhotonDistribution,
    K: int,
    tail_tol: float = DEFAULT_TAIL_TOL,
    strict: bool = False,
) -> FactorialMomentSequence:
    """正規順序モーメント γ_n = Σ_j j!/(j-n)! p_j を n <= K まで計算

    An entry n >= 1 is accepted only while the edge terms of its sum shrink
    (ratio r < 1) and the last included term is below tail_tol times the
    partial sum; the geometric estimate t*r/(1-r) is kept as its tail bound.
    Accumulation stops at the first rejected entry. gamma_0 is the window
    total and is always accepted.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    nmax = dist.nmax
    j = np.arange(nmax + 1)
    log_p = np.where(dist.positive_mask(), dist.log_array(), NEG_INF)

    values = [dist.total]
    bounds = [_edge_tail_bound(log_p, 0)]

    for n in range(1, min(K, nmax) + 1):
        log_terms = gammaln(j[n:] + 1.0) - gammaln(j[n:] - n + 1.0) + log_p[n:]
        log_sum = compensated_log_sum(log_terms)
        accepted, reason, bound = _accept_tail(log_terms, log_sum, tail_tol)
        if accepted and log_sum > LOG_FLOAT_MAX:
            accepted, reason = False, "overflow"
        if not accepted:
            logger.debug("gamma_%d rejected (%s); finite_through=%d", n, reason, n - 1)
            if strict:
                raise DivergentTail(n, _edge_ratio(log_terms))
            break
        values.append(math.exp(log_sum) if log_sum != NEG_INF else 0.0)
        bounds.append(bound)

    if K > nmax and len(values) == nmax + 1:
        logger.debug("gamma_n requested through %d but window ends at %d", K, nmax)
        if strict:
            raise DivergentTail(nmax + 1)

    return FactorialMomentSequence(
        values=tuple(values),
        finite_through=len(values) - 1,
        tail_bound=tuple(bounds),
    )


def _edge_ratio(log_terms: np.ndarray) -> float:
    if log_terms.size < 2 or not np.isfinite(log_terms[-2]):
        return math.inf
    return math.exp(min(float(log_terms[-1] - log_terms[-2]), LOG_FLOAT_MAX))


def _accept_tail(log_terms: np.ndarray, log_sum: float, tail_tol: float) -> Tuple[bool, str, float]:
    last = float(log_terms[-1])
    if last == NEG_INF:
        # 窓の端がゼロ: 有限台の分布
        return True, "", 0.0
    ratio = _edge_ratio(log_terms)
    if ratio >= 1.0:
        return False, f"edge ratio {ratio:.3g} >= 1", math.inf
    if last >= math.log(tail_tol) + log_sum:
        return False, "last term above tail_tol", math.inf
    return True, "", math.exp(last) * ratio / (1.0 - ratio)


def _edge_tail_bound(log_p: np.ndarray, n: int) -> float:
    accepted, _, bound = _accept_tail(log_p[n:], compensated_log_sum(log_p[n:]), 1.0)
    return bound if accepted else math.inf


def mandel_q(gamma: FactorialMomentSequence) -> float:
    """Mandel の Q = (γ0 γ2 - γ1^2) / (γ0 γ1)。負なら準ポアソン"""
    if gamma.finite_through < 2:
        raise WindowTooShort(2, gamma.finite_through, "Mandel Q")
    g0, g1, g2 = gamma.values[:3]
    if g0 <= 0 or g1 <= 0:
        raise ValueError("Mandel Q is undefined for gamma_0 = 0 or gamma_1 = 0")
    return (g0 * g2 - g1 * g1) / (g0 * g1)
