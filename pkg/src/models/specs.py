import math
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.distribution import PhotonDistribution


class CoherentMixtureSpec(BaseModel):
    """コヒーレント状態の非干渉混合 Σ λ_j |α_j><α_j|"""
    model_config = ConfigDict(frozen=True)

    weights: Tuple[float, ...]
    intensities: Tuple[float, ...]

    @field_validator("weights")
    @classmethod
    def _weights_nonnegative(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not v:
            raise ValueError("mixture needs at least one component")
        if any(w < 0 or not math.isfinite(w) for w in v):
            raise ValueError("weights must be finite and nonnegative")
        if abs(math.fsum(v) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {math.fsum(v)!r}")
        return v

    @field_validator("intensities")
    @classmethod
    def _intensities_nonnegative(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(mu < 0 or not math.isfinite(mu) for mu in v):
            raise ValueError("intensities must be finite and nonnegative")
        return v

    @model_validator(mode="after")
    def _same_length(self) -> "CoherentMixtureSpec":
        if len(self.weights) != len(self.intensities):
            raise ValueError("weights and intensities must have the same length")
        return self

    @classmethod
    def single(cls, intensity: float) -> "CoherentMixtureSpec":
        return cls(weights=(1.0,), intensities=(intensity,))

    @property
    def max_intensity(self) -> float:
        return max(self.intensities)

    def components(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.weights, self.intensities))


# 古典的な p_n の振動を示す5成分混合
FIG1_MIXTURE = CoherentMixtureSpec(
    weights=(0.25, 0.25, 0.2, 0.18, 0.12),
    intensities=(10.0, 30.0, 60.0, 90.0, 130.0),
)


class CatStateSpec(BaseModel):
    """二成分コヒーレント重ね合わせ N[|z0> + e^{iθ}|-z0>]"""
    model_config = ConfigDict(frozen=True)

    intensity: float = Field(ge=0.0)
    theta: float = 0.0

    @field_validator("theta")
    @classmethod
    def _finite_theta(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("theta must be finite")
        return v


class PhotonAddedSpec(BaseModel):
    """光子付加状態 N a†^m ρ0 a^m（ρ0 は対角成分のみ）"""
    model_config = ConfigDict(frozen=True)

    base: PhotonDistribution
    m: int = Field(ge=0)
