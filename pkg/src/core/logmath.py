"""
Log-domain arithmetic helpers

Factorials overflow a double at n = 171 while the windows analysed here reach
n of several hundred, so every magnitude is carried as a natural logarithm
and exponentiated only at the end.
"""
import math
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

NEG_INF = float("-inf")

# exp() of anything above this overflows a double
LOG_FLOAT_MAX = 709.0


def log_factorial(n: np.ndarray) -> np.ndarray:
    """log(n!) をlog-gammaで計算"""
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def log_magnitudes(values: Iterable[float]) -> Tuple[np.ndarray, np.ndarray]:
    """非負の値列を (符号, 対数絶対値) に分解（ゼロは符号0, -inf）"""
    arr = np.asarray(list(values), dtype=float)
    signs = (arr > 0).astype(int)
    with np.errstate(divide="ignore"):
        logs = np.where(signs > 0, np.log(np.where(signs > 0, arr, 1.0)), NEG_INF)
    return signs, logs


def compensated_log_sum(log_terms: Sequence[float]) -> float:
    """対数で与えた非負項の和を降順・補償加算で求め、対数で返す"""
    terms = np.asarray(log_terms, dtype=float)
    finite = terms[np.isfinite(terms)]
    if finite.size == 0:
        return NEG_INF
    peak = float(finite.max())
    scaled = sorted(np.exp(finite - peak), reverse=True)
    return peak + math.log(math.fsum(scaled))


def log_weighted_sum(log_terms: np.ndarray, weights: np.ndarray, axis: int = -1) -> np.ndarray:
    """重み付き和 log Σ w_i exp(l_i)（重みは非負）"""
    return logsumexp(log_terms, axis=axis, b=weights)


def linear_or_scaled(log_lhs: float, log_rhs: float) -> Tuple[float, float, float]:
    """二つの対数値を実数に戻す。溢れる場合は共通スケールで割った値を返す

    Returns (lhs, rhs, log_scale) with lhs = exp(log_lhs - log_scale) etc.
    """
    finite = [v for v in (log_lhs, log_rhs) if math.isfinite(v)]
    log_scale = 0.0
    if finite and max(abs(v) for v in finite) > LOG_FLOAT_MAX:
        log_scale = max(finite)
    lhs = math.exp(log_lhs - log_scale) if math.isfinite(log_lhs) else 0.0
    rhs = math.exp(log_rhs - log_scale) if math.isfinite(log_rhs) else 0.0
    return lhs, rhs, log_scale


def gauge_parameters(log_values: Sequence[float]) -> Tuple[float, float]:
    """s'_n = s_n c^n / a の (log a, log c) を決める

    Anchors the first positive entry k at 1 and picks the largest c for which
    no later entry exceeds it, so the rescaled sequence peaks at exactly 1.
    """
    logs = np.asarray(log_values, dtype=float)
    positive = np.flatnonzero(np.isfinite(logs))
    if positive.size == 0:
        return 0.0, 0.0
    k = int(positive[0])
    later = positive[positive > k]
    if later.size == 0:
        log_c = 0.0
    else:
        log_c = float(np.min((logs[k] - logs[later]) / (later - k)))
    log_a = float(logs[k] + k * log_c)
    return log_a, log_c


def apply_gauge(log_values: Sequence[float], log_a: float, log_c: float) -> np.ndarray:
    """対数列にゲージ変換 s_n c^n / a を適用"""
    logs = np.asarray(log_values, dtype=float)
    n = np.arange(logs.size, dtype=float)
    return logs + n * log_c - log_a
