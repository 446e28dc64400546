"""
Slow-path moments of radial intensity distributions

Moments are computed straight from their defining integrals, either in
closed form over point masses or by composite Gauss-Legendre quadrature over
a continuous density, so that the fast transforms can be cross-checked.
"""
import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import logsumexp, roots_legendre, xlogy

from src.config.settings import Settings, get_settings
from src.core.logmath import LOG_FLOAT_MAX
from src.models.distribution import FactorialMomentSequence, MomentSequence
from src.models.errors import QuadratureNotConverged
from src.models.specs import CoherentMixtureSpec

logger = logging.getLogger(__name__)

LogDensity = Callable[[np.ndarray], np.ndarray]


class QuadratureScheme(BaseModel):
    """複合 Gauss-Legendre 則の設定"""
    model_config = ConfigDict(frozen=True)

    nodes_per_panel: int = Field(default=32, ge=2)
    initial_panels: int = Field(default=32, ge=1)
    max_doublings: int = Field(default=6, ge=0)
    rtol: float = Field(default=1e-11, gt=0.0)
    cutoff: float = Field(default=1e-18, gt=0.0)
    max_domain_doublings: int = Field(default=40, ge=0)

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "QuadratureScheme":
        """設定ファイルの quadrature セクションから構築"""
        settings = settings or get_settings()
        return cls(**settings.quadrature.model_dump())


class RadialKind(str, Enum):
    ATOMS = "atoms"
    DENSITY = "density"


class RadialDistribution(BaseModel):
    """強度 I = |z|^2 の動径分布 P(I)（点質量または連続密度）"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: RadialKind
    atoms: Tuple[Tuple[float, float], ...] = ()
    log_density: Optional[LogDensity] = None
    domain: Tuple[float, float] = (0.0, 0.0)
    quadrature: QuadratureScheme = Field(default_factory=QuadratureScheme.from_settings)

    @model_validator(mode="after")
    def _check_kind(self) -> "RadialDistribution":
        if self.kind == RadialKind.ATOMS:
            if not self.atoms:
                raise ValueError("point-mass distribution needs at least one atom")
            for weight, intensity in self.atoms:
                if weight < 0 or intensity < 0:
                    raise ValueError("atoms need nonnegative weights and intensities")
        else:
            if self.log_density is None:
                raise ValueError("continuous distribution needs a log density")
            lo, hi = self.domain
            if not 0.0 <= lo < hi:
                raise ValueError(f"invalid domain {self.domain}")
        return self

    def evaluate(self, intensity: np.ndarray) -> np.ndarray:
        """P(I) を評価（連続密度のみ）"""
        if self.log_density is None:
            raise TypeError("point masses have no pointwise density")
        return np.exp(self.log_density(np.asarray(intensity, dtype=float)))


class QuadratureResult(BaseModel):
    """対数モーメントと収束の証拠"""
    model_config = ConfigDict(frozen=True)

    log_moments: Tuple[float, ...]
    weighted: bool
    panels: int = 0
    domain: Tuple[float, float] = (0.0, 0.0)
    max_change: float = 0.0


def radial_of_coherent_mixture(spec: CoherentMixtureSpec) -> RadialDistribution:
    """コヒーレント混合: I = |α_j|^2 の点質量"""
    return RadialDistribution(kind=RadialKind.ATOMS, atoms=spec.components())


def radial_of_thermal(
    mean: float,
    n_hint: int = 40,
    scheme: Optional[QuadratureScheme] = None,
) -> RadialDistribution:
    """熱的状態: P(I) = e^{-I/n̄} / n̄"""
    if mean < 0 or not math.isfinite(mean):
        raise ValueError(f"mean photon number must be finite and nonnegative, got {mean!r}")
    scheme = scheme or QuadratureScheme.from_settings()
    if mean == 0:
        return RadialDistribution(kind=RadialKind.ATOMS, atoms=((1.0, 0.0),), quadrature=scheme)
    log_mean = math.log(mean)

    def log_density(intensity: np.ndarray) -> np.ndarray:
        return -intensity / mean - log_mean

    i_max = mean * (n_hint + 10.0 * math.sqrt(n_hint))
    return RadialDistribution(
        kind=RadialKind.DENSITY,
        log_density=log_density,
        domain=(0.0, i_max),
        quadrature=scheme,
    )


@lru_cache(maxsize=None)
def _legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return roots_legendre(n)


def _log_integrand(r: RadialDistribution, intensity: np.ndarray, n_max: int, weighted: bool) -> np.ndarray:
    """log(P(I) e^{-wI} I^n) を (n, node) の配列で"""
    n = np.arange(n_max + 1, dtype=float)[:, None]
    log_p = r.log_density(intensity)[None, :]
    damping = intensity[None, :] if weighted else 0.0
    with np.errstate(divide="ignore"):
        return log_p - damping + xlogy(n, intensity[None, :])


def _settle_domain(r: RadialDistribution, n_max: int, weighted: bool) -> Tuple[float, float]:
    """被積分関数が上端でピークの cutoff 倍を下回るまで上端を延ばす"""
    lo, hi = r.domain
    log_cut = math.log(r.quadrature.cutoff)
    for _ in range(r.quadrature.max_domain_doublings + 1):
        grid = np.linspace(lo, hi, 2049)[1:]
        logs = _log_integrand(r, grid, n_max, weighted)
        drop = logs[:, -1] - logs.max(axis=1)
        if np.all(drop < log_cut):
            return lo, hi
        hi = lo + 2.0 * (hi - lo)
    raise QuadratureNotConverged(int(np.argmax(drop)), float(np.exp(np.max(drop))))


def _composite_log_integral(
    r: RadialDistribution, lo: float, hi: float, panels: int, n_max: int, weighted: bool
) -> np.ndarray:
    x, w = _legendre(r.quadrature.nodes_per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    log_weights = (np.log(half)[:, None] + np.log(w)[None, :]).ravel()
    return logsumexp(_log_integrand(r, nodes, n_max, weighted) + log_weights[None, :], axis=1)


def integrate_moments(r: RadialDistribution, n_max: int, weighted: bool) -> QuadratureResult:
    """∫ P(I) e^{-wI} I^n dI（w = 1 なら q_n、w = 0 なら γ_n）を対数で"""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if r.kind == RadialKind.ATOMS:
        weights = np.array([a[0] for a in r.atoms])
        intensities = np.array([a[1] for a in r.atoms])
        n = np.arange(n_max + 1, dtype=float)[:, None]
        damping = intensities[None, :] if weighted else 0.0
        logs = logsumexp(xlogy(n, intensities[None, :]) - damping, axis=1, b=weights[None, :])
        return QuadratureResult(log_moments=tuple(float(v) for v in logs), weighted=weighted)

    scheme = r.quadrature
    lo, hi = _settle_domain(r, n_max, weighted)
    panels = scheme.initial_panels
    previous = _composite_log_integral(r, lo, hi, panels, n_max, weighted)
    change = np.full(n_max + 1, np.inf)
    for level in range(scheme.max_doublings):
        panels *= 2
        current = _composite_log_integral(r, lo, hi, panels, n_max, weighted)
        # |Δ log m| は相対変化と一致（一次まで）
        change = np.abs(current - previous)
        logger.debug("quadrature level %d: %d panels, max relative change %.3g", level, panels, change.max())
        previous = current
        if np.all(change < scheme.rtol):
            return QuadratureResult(
                log_moments=tuple(float(v) for v in current),
                weighted=weighted,
                panels=panels,
                domain=(lo, hi),
                max_change=float(change.max()),
            )
    worst = int(np.argmax(change))
    raise QuadratureNotConverged(worst, float(change[worst]))


def moments_by_quadrature(
    r: RadialDistribution,
    n_max: int,
    weighted: bool,
) -> Union[MomentSequence, FactorialMomentSequence]:
    """重み付きなら q_n、重みなしなら γ_n を数値積分で求める"""
    result = integrate_moments(r, n_max, weighted)
    if weighted:
        return MomentSequence.from_logs(result.log_moments)

    logs = np.asarray(result.log_moments)
    overflow = np.flatnonzero(logs > LOG_FLOAT_MAX)
    representable = int(overflow[0]) if overflow.size else logs.size
    if representable == 0:
        raise QuadratureNotConverged(0, math.inf)
    with np.errstate(under="ignore"):
        values = np.exp(logs[:representable])
    bounds = values * max(result.max_change, np.finfo(float).eps)
    return FactorialMomentSequence(
        values=tuple(float(v) for v in values),
        finite_through=representable - 1,
        tail_bound=tuple(float(b) for b in bounds),
    )
