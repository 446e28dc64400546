# Quadrature oracle module
from src.oracle.quadrature import (
    QuadratureResult,
    QuadratureScheme,
    RadialDistribution,
    RadialKind,
    integrate_moments,
    moments_by_quadrature,
    radial_of_coherent_mixture,
    radial_of_thermal,
)

__all__ = [
    "RadialDistribution",
    "RadialKind",
    "QuadratureScheme",
    "QuadratureResult",
    "radial_of_coherent_mixture",
    "radial_of_thermal",
    "integrate_moments",
    "moments_by_quadrature",
]
