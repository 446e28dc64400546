"""
Photon-number distributions of analytic state families
"""
import logging
import math
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Mapping, Optional

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from src.core.logmath import NEG_INF, compensated_log_sum, log_factorial
from src.models.distribution import (
    NormPolicy,
    PhotonDistribution,
    distribution_from_logs,
    make_distribution,
)
from src.models.errors import DegenerateCat, WindowTooShort
from src.models.specs import FIG1_MIXTURE, CatStateSpec, CoherentMixtureSpec, PhotonAddedSpec

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_SIGMAS = 10.0
DEFAULT_MIN_NMAX = 20
DEFAULT_PHOTON_ADDED_TAIL = 1e-9


def _indices(nmax: int) -> np.ndarray:
    if nmax < 0:
        raise ValueError(f"nmax must be nonnegative, got {nmax}")
    return np.arange(nmax + 1, dtype=float)


def _from_logs(log_p: np.ndarray) -> PhotonDistribution:
    # 解析的な値なので zero_tol=0、log p_n も保持（アンダーフローした裾はゼロではない）
    return distribution_from_logs(log_p, norm_policy=NormPolicy.TRUNCATED, zero_tol=0.0)


def _poisson_logs(intensity: float, n: np.ndarray) -> np.ndarray:
    return xlogy(n, intensity) - intensity - gammaln(n + 1.0)


def coherent(intensity: float, nmax: int) -> PhotonDistribution:
    """コヒーレント状態: p_n = e^{-μ} μ^n / n!"""
    if intensity < 0 or not math.isfinite(intensity):
        raise ValueError(f"intensity must be finite and nonnegative, got {intensity!r}")
    return _from_logs(_poisson_logs(intensity, _indices(nmax)))


def thermal(mean: float, nmax: int) -> PhotonDistribution:
    """熱的状態: p_n = n̄^n / (1+n̄)^{n+1}"""
    if mean < 0 or not math.isfinite(mean):
        raise ValueError(f"mean photon number must be finite and nonnegative, got {mean!r}")
    n = _indices(nmax)
    return _from_logs(xlogy(n, mean) - (n + 1.0) * math.log1p(mean))


def fock(m: int, nmax: int) -> PhotonDistribution:
    """Fock 状態 |m>"""
    if m < 0:
        raise ValueError(f"photon number must be nonnegative, got {m}")
    if m > nmax:
        raise WindowTooShort(m, nmax, "Fock state")
    values = [0.0] * (nmax + 1)
    values[m] = 1.0
    return make_distribution(values, norm_policy=NormPolicy.TRUNCATED, zero_tol=0.0)


def coherent_mixture(spec: CoherentMixtureSpec, nmax: int) -> PhotonDistribution:
    """コヒーレント状態の凸結合"""
    n = _indices(nmax)
    intensities = np.asarray(spec.intensities, dtype=float)[:, None]
    weights = np.asarray(spec.weights, dtype=float)[:, None]
    component_logs = xlogy(n[None, :], intensities) - intensities - gammaln(n + 1.0)[None, :]
    return _from_logs(logsumexp(component_logs, axis=0, b=weights))


def cat_state(spec: CatStateSpec, nmax: int) -> PhotonDistribution:
    """二成分重ね合わせ N[|z0> + e^{iθ}|-z0>] の光子数分布

    p_n = e^{-μ} μ^n/n! (1 + (-1)^n cos θ) / (1 + cos θ e^{-2μ}), normalized
    over all n rather than over the window.
    """
    mu, c = spec.intensity, math.cos(spec.theta)
    # 1 + c e^{-2μ} を桁落ちなしで
    norm = (1.0 + c) + c * math.expm1(-2.0 * mu)
    if norm <= 0.0:
        raise DegenerateCat(mu, spec.theta)
    n = _indices(nmax)
    interference = np.where(n % 2 == 0, 1.0 + c, 1.0 - c)
    with np.errstate(divide="ignore"):
        log_p = _poisson_logs(mu, n) + np.log(interference) - math.log(norm)
    return _from_logs(log_p)


def photon_added(
    spec: PhotonAddedSpec,
    nmax: int,
    tail_tol: float = DEFAULT_PHOTON_ADDED_TAIL,
) -> PhotonDistribution:
    """光子付加: p_n ∝ n!/(n-m)! base_{n-m}（n < m は 0）

    The normalization runs over every base entry; the part of it lying
    beyond the base window is estimated from the edge ratio and must stay
    below tail_tol relative to the total.
    """
    base, m = spec.base, spec.m
    if nmax - m > base.nmax:
        raise WindowTooShort(nmax - m, base.nmax, "photon-added base")
    if m == 0:
        return make_distribution(
            base.values[: nmax + 1], norm_policy=NormPolicy.TRUNCATED, zero_tol=base.zero_tol,
            log_values=None if base.log_values is None else base.log_values[: nmax + 1],
        )

    k = np.arange(base.nmax + 1, dtype=float)
    log_base = np.where(base.positive_mask(), base.log_array(), NEG_INF)
    log_w = gammaln(k + m + 1.0) - log_factorial(k) + log_base
    log_total = compensated_log_sum(log_w)

    relative_tail = _relative_edge_tail(log_w, log_total)
    if relative_tail >= tail_tol:
        logger.debug("photon-added renormalization tail %.3g exceeds %.3g", relative_tail, tail_tol)
        raise WindowTooShort(base.nmax + 1, base.nmax, "photon-added renormalization")

    log_p = np.full(nmax + 1, NEG_INF)
    shifted = log_w[: max(nmax - m + 1, 0)] - log_total
    log_p[m: m + shifted.size] = shifted
    return _from_logs(log_p)


def _relative_edge_tail(log_w: np.ndarray, log_total: float) -> float:
    if log_w[-1] == NEG_INF:
        return 0.0
    if log_w.size < 2 or log_w[-2] == NEG_INF:
        return math.inf
    ratio = math.exp(log_w[-1] - log_w[-2])
    if ratio >= 1.0:
        return math.inf
    return math.exp(log_w[-1] - log_total) * ratio / (1.0 - ratio)


def suggest_nmax(
    intensities: Iterable[float],
    sigmas: float = DEFAULT_WINDOW_SIGMAS,
    minimum: int = DEFAULT_MIN_NMAX,
) -> int:
    """ポアソン成分を覆う窓 μ_max + sigmas·√μ_max を提案"""
    mu = max(intensities, default=0.0)
    suggestion = max(math.ceil(mu + sigmas * math.sqrt(mu)), minimum)
    logger.debug("suggested nmax=%d for max intensity %.6g", suggestion, mu)
    return suggestion


def suggest_thermal_nmax(mean: float, tail: float = 1e-10, minimum: int = DEFAULT_MIN_NMAX) -> int:
    """幾何分布の裾 (n̄/(1+n̄))^{n+1} が tail 未満になる窓を提案"""
    if mean <= 0:
        return minimum
    log_ratio = math.log(mean) - math.log1p(mean)
    return max(math.ceil(math.log(tail) / log_ratio), minimum)


class StateKind(str, Enum):
    """生成可能な状態"""
    COHERENT = "coherent"
    THERMAL = "thermal"
    FOCK = "fock"
    MIXTURE = "mixture"
    CAT = "cat"
    PHOTON_ADDED = "photon-added"


MIXTURE_PRESETS: Dict[str, CoherentMixtureSpec] = {
    "fig1": FIG1_MIXTURE,
}


class StateGenerator:
    """状態名とパラメータから分布を生成する"""

    def __init__(
        self,
        window_sigmas: float = DEFAULT_WINDOW_SIGMAS,
        min_nmax: int = DEFAULT_MIN_NMAX,
        photon_added_tail_tol: float = DEFAULT_PHOTON_ADDED_TAIL,
    ):
        self.window_sigmas = window_sigmas
        self.min_nmax = min_nmax
        self.photon_added_tail_tol = photon_added_tail_tol
        self.builders: Dict[StateKind, Callable[[Mapping[str, Any], int], PhotonDistribution]] = {
            StateKind.COHERENT: lambda p, nmax: coherent(float(p["intensity"]), nmax),
            StateKind.THERMAL: lambda p, nmax: thermal(float(p["mean"]), nmax),
            StateKind.FOCK: lambda p, nmax: fock(int(p["m"]), nmax),
            StateKind.MIXTURE: lambda p, nmax: coherent_mixture(self.mixture_spec(p), nmax),
            StateKind.CAT: lambda p, nmax: cat_state(
                CatStateSpec(intensity=float(p["intensity"]), theta=float(p.get("theta", 0.0))), nmax
            ),
            StateKind.PHOTON_ADDED: self._photon_added,
        }

    def get_available_states(self) -> list:
        """利用可能な状態のリスト"""
        return [kind.value for kind in self.builders]

    def mixture_spec(self, params: Mapping[str, Any]) -> CoherentMixtureSpec:
        preset = params.get("spec")
        if preset:
            if preset not in MIXTURE_PRESETS:
                raise ValueError(f"サポートされていない混合プリセット: {preset}")
            return MIXTURE_PRESETS[preset]
        return CoherentMixtureSpec(
            weights=tuple(params["weights"]), intensities=tuple(params["intensities"])
        )

    def suggest_window(self, kind: StateKind, params: Mapping[str, Any]) -> int:
        """状態に応じた既定の nmax"""
        kind = StateKind(kind)
        if kind in (StateKind.COHERENT, StateKind.CAT):
            return suggest_nmax([float(params["intensity"])], self.window_sigmas, self.min_nmax)
        if kind == StateKind.MIXTURE:
            return suggest_nmax(self.mixture_spec(params).intensities, self.window_sigmas, self.min_nmax)
        if kind == StateKind.THERMAL:
            return suggest_thermal_nmax(float(params["mean"]), minimum=self.min_nmax)
        if kind == StateKind.FOCK:
            return max(int(params["m"]) + 2, self.min_nmax)
        return self._photon_added_window(params)

    def generate(
        self,
        kind: StateKind,
        params: Optional[Mapping[str, Any]] = None,
        nmax: Optional[int] = None,
    ) -> PhotonDistribution:
        """指定された状態の分布を生成"""
        kind = StateKind(kind)
        params = dict(params or {})
        if nmax is None:
            nmax = self.suggest_window(kind, params)
        try:
            builder = self.builders[kind]
        except KeyError:
            raise ValueError(f"サポートされていない状態: {kind}")
        logger.debug("generating %s with nmax=%d params=%s", kind.value, nmax, params)
        return builder(params, nmax)

    def _photon_added(self, params: Mapping[str, Any], nmax: int) -> PhotonDistribution:
        base_kind = StateKind(params.get("base", StateKind.THERMAL.value))
        if base_kind == StateKind.PHOTON_ADDED:
            raise ValueError("photon-added base must be a plain state")
        base = self.generate(base_kind, params, nmax)
        spec = PhotonAddedSpec(base=base, m=int(params.get("added", 1)))
        return photon_added(spec, nmax, tail_tol=self.photon_added_tail_tol)

    def _photon_added_window(self, params: Mapping[str, Any]) -> int:
        # a†^m の重み n!/(n-m)! が裾を持ち上げるので、基底の窓より深く取る
        added = int(params.get("added", 1))
        base_kind = StateKind(params.get("base", StateKind.THERMAL.value))
        if base_kind == StateKind.THERMAL:
            return suggest_thermal_nmax(float(params["mean"]), tail=1e-18, minimum=self.min_nmax) + added
        if base_kind == StateKind.PHOTON_ADDED:
            raise ValueError("photon-added base must be a plain state")
        return self.suggest_window(base_kind, params) + added
