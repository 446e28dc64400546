"""
Photon statistics data models
"""
import math
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.logmath import log_magnitudes
from src.models.errors import (
    InputFormatError,
    NegativeProbability,
    NormalizationViolation,
    WindowTooShort,
)


LOG_CONSISTENCY_RTOL = 1e-9
LOG_CONSISTENCY_ATOL = 1e-300


class NormPolicy(str, Enum):
    """正規化ポリシー"""
    EXACT = "exact"          # Σ p_n = 1（許容誤差内）
    TRUNCATED = "truncated"  # Σ p_n ≤ 1（有限窓）


class PhotonDistribution(BaseModel):
    """光子数分布 p_0..p_nmax の有限窓"""
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]
    norm_policy: NormPolicy = NormPolicy.TRUNCATED
    zero_tol: float = Field(default=1e-12, ge=0.0)
    norm_tol: float = Field(default=1e-9, ge=0.0)
    # 解析的な log p_n（ゼロは -inf）。線形値がアンダーフローしても裾を保つ
    log_values: Optional[Tuple[float, ...]] = None

    @model_validator(mode="after")
    def _check_invariants(self) -> "PhotonDistribution":
        if not self.values:
            raise WindowTooShort(0, -1, "photon distribution")
        for n, value in enumerate(self.values):
            if not math.isfinite(value):
                raise InputFormatError(f"non-finite probability {value!r}", field=f"values[{n}]")
            if value < 0:
                raise NegativeProbability(n, value)
        if self.log_values is not None:
            self._check_log_values()
        total = self.total
        if self.norm_policy == NormPolicy.EXACT and abs(total - 1.0) > self.norm_tol:
            raise NormalizationViolation(total, self.norm_policy.value)
        if self.norm_policy == NormPolicy.TRUNCATED and total > 1.0 + self.norm_tol:
            raise NormalizationViolation(total, self.norm_policy.value)
        return self

    def _check_log_values(self) -> None:
        if len(self.log_values) != len(self.values):
            raise InputFormatError("log_values must have one entry per value", field="log_values")
        for n, (value, log_value) in enumerate(zip(self.values, self.log_values)):
            if math.isnan(log_value) or log_value == math.inf:
                raise InputFormatError(f"invalid log probability {log_value!r}", field=f"log_values[{n}]")
            if log_value == -math.inf:
                if value != 0.0:
                    raise InputFormatError(f"p_{n} = {value!r} but its log is -inf", field=f"log_values[{n}]")
                continue
            if not math.isclose(value, math.exp(log_value), rel_tol=LOG_CONSISTENCY_RTOL,
                                abs_tol=LOG_CONSISTENCY_ATOL):
                raise InputFormatError(f"log_values[{n}] does not match p_{n} = {value!r}",
                                       field=f"log_values[{n}]")

    @property
    def nmax(self) -> int:
        return len(self.values) - 1

    @property
    def total(self) -> float:
        return math.fsum(self.values)

    @property
    def zero_threshold(self) -> float:
        """この値以下の p_n をゼロとみなす（max p_n に対する相対値）"""
        return self.zero_tol * max(self.values)

    def log_array(self) -> np.ndarray:
        """log p_n（ゼロは -inf）。解析的な対数値があればそれを優先"""
        if self.log_values is not None:
            return np.asarray(self.log_values, dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(self.as_array())

    def positive_mask(self) -> np.ndarray:
        """ゼロとみなさない p_n の位置（log p_n > log zero_tol + log max p_n）"""
        logs = self.log_array()
        if self.zero_tol == 0.0:
            return logs > -math.inf
        return logs > math.log(self.zero_tol) + float(np.max(logs))

    def is_zero(self, n: int) -> bool:
        return not bool(self.positive_mask()[n])

    def zero_indices(self) -> List[int]:
        return [int(n) for n in np.flatnonzero(~self.positive_mask())]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def make_distribution(
    values: Iterable[float],
    norm_policy: NormPolicy = NormPolicy.TRUNCATED,
    zero_tol: float = 1e-12,
    norm_tol: float = 1e-9,
    log_values: Optional[Sequence[float]] = None,
) -> PhotonDistribution:
    """検証付きで PhotonDistribution を構築（-zero_tol 以内の負値は0に丸める）"""
    raw = [float(v) for v in values]
    if not raw:
        raise WindowTooShort(0, -1, "photon distribution")
    for n, value in enumerate(raw):
        if not math.isfinite(value):
            raise InputFormatError(f"non-finite probability {value!r}", field=f"values[{n}]")

    threshold = zero_tol * max(max(raw), 0.0)
    cleaned = []
    for n, value in enumerate(raw):
        if value < 0:
            if value < -threshold:
                raise NegativeProbability(n, value)
            value = 0.0
        cleaned.append(value)

    return PhotonDistribution(
        values=tuple(cleaned),
        norm_policy=NormPolicy(norm_policy),
        zero_tol=zero_tol,
        norm_tol=norm_tol,
        log_values=None if log_values is None else tuple(float(v) for v in log_values),
    )


def distribution_from_logs(
    log_values: Sequence[float],
    norm_policy: NormPolicy = NormPolicy.TRUNCATED,
    zero_tol: float = 0.0,
    norm_tol: float = 1e-9,
) -> PhotonDistribution:
    """log p_n から構築（線形値は exp、対数値はそのまま保持）"""
    logs = np.asarray(log_values, dtype=float)
    with np.errstate(under="ignore"):
        values = np.exp(logs)
    return make_distribution(values.tolist(), norm_policy=norm_policy, zero_tol=zero_tol,
                             norm_tol=norm_tol, log_values=logs.tolist())


class MomentSequence(BaseModel):
    """q_n = n! p_n を (符号, 対数絶対値) で保持するモーメント列"""
    model_config = ConfigDict(frozen=True)

    signs: Tuple[int, ...]
    log_values: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_invariants(self) -> "MomentSequence":
        if len(self.signs) != len(self.log_values):
            raise ValueError("signs and log_values must have the same length")
        if not self.signs:
            raise ValueError("moment sequence is empty")
        for n, (sign, log_value) in enumerate(zip(self.signs, self.log_values)):
            if sign not in (0, 1):
                raise ValueError(f"sign of q_{n} must be 0 or +1, got {sign}")
            if sign == 0 and log_value != float("-inf"):
                raise ValueError(f"q_{n} has sign 0 but finite log magnitude")
            if sign == 1 and not math.isfinite(log_value):
                raise ValueError(f"q_{n} is positive but its log magnitude is {log_value}")
        return self

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "MomentSequence":
        """実数値の列から構築（負値はエラー）"""
        raw = [float(v) for v in values]
        for n, value in enumerate(raw):
            if not math.isfinite(value):
                raise InputFormatError(f"non-finite moment {value!r}", field=f"values[{n}]")
            if value < 0:
                raise NegativeProbability(n, value)
        signs, logs = log_magnitudes(raw)
        return cls(signs=tuple(int(s) for s in signs), log_values=tuple(float(v) for v in logs))

    @classmethod
    def from_logs(cls, log_values: Sequence[float]) -> "MomentSequence":
        """対数値（ゼロは -inf）から構築"""
        logs = [float(v) for v in log_values]
        signs = tuple(0 if v == float("-inf") else 1 for v in logs)
        return cls(signs=signs, log_values=tuple(logs))

    @property
    def nmax(self) -> int:
        return len(self.signs) - 1

    def pairs(self) -> List[Tuple[int, float]]:
        return list(zip(self.signs, self.log_values))

    def is_positive(self, n: int) -> bool:
        return self.signs[n] == 1

    def log_array(self) -> np.ndarray:
        return np.asarray(self.log_values, dtype=float)

    def values(self) -> np.ndarray:
        """線形スケールの値（大きな n ではinfになり得る）"""
        with np.errstate(over="ignore"):
            return np.exp(self.log_array())


class FactorialMomentSequence(BaseModel):
    """正規順序モーメント γ_n の列"""
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]
    finite_through: int
    tail_bound: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_invariants(self) -> "FactorialMomentSequence":
        if not self.values:
            raise ValueError("factorial moment sequence is empty")
        if len(self.tail_bound) != len(self.values):
            raise ValueError("tail_bound must have one entry per value")
        if not 0 <= self.finite_through <= len(self.values) - 1:
            raise ValueError("finite_through must index an available value")
        for n, value in enumerate(self.values):
            if not value >= 0:
                raise NegativeProbability(n, value)
        return self

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "FactorialMomentSequence":
        """測定済みの γ_n 列から構築（裾誤差なし）"""
        raw = [float(v) for v in values]
        for n, value in enumerate(raw):
            if not math.isfinite(value):
                raise InputFormatError(f"non-finite moment {value!r}", field=f"values[{n}]")
            if value < 0:
                raise NegativeProbability(n, value)
        if not raw:
            raise WindowTooShort(0, -1, "factorial moments")
        return cls(values=tuple(raw), finite_through=len(raw) - 1, tail_bound=(0.0,) * len(raw))

    @property
    def nmax(self) -> int:
        return self.finite_through

    def to_moment_sequence(self) -> MomentSequence:
        """信頼できる範囲を対数形式のモーメント列として返す"""
        return MomentSequence.from_values(self.values[: self.finite_through + 1])


class XnSequence(BaseModel):
    """x_n = q_n q_{n+2} / q_{n+1}^2 と定義マスク"""
    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]
    defined: Tuple[bool, ...]

    @model_validator(mode="after")
    def _check_invariants(self) -> "XnSequence":
        if len(self.values) != len(self.defined):
            raise ValueError("values and defined must have the same length")
        for n, (value, ok) in enumerate(zip(self.values, self.defined)):
            if ok and not (math.isfinite(value) and value > 0):
                raise ValueError(f"x_{n} is marked defined but equals {value!r}")
        return self

    def __len__(self) -> int:
        return len(self.values)

    def is_defined(self, n: int) -> bool:
        return 0 <= n < len(self.values) and self.defined[n]

    def deviation(self, n: int) -> float:
        """x_n - 1"""
        return self.values[n] - 1.0


Matrix = Tuple[Tuple[float, ...], ...]


class HankelPair(BaseModel):
    """次数 N のハンケル行列の組（L, L~ または M, M~）"""
    model_config = ConfigDict(frozen=True)

    order: int = Field(ge=0)
    unshifted: Matrix
    shifted: Optional[Matrix] = None
    scale: Tuple[float, float]
    log_scale: Tuple[float, float]
    source: str = "q"

    @model_validator(mode="after")
    def _check_shapes(self) -> "HankelPair":
        size = self.order + 1
        for name in ("unshifted", "shifted"):
            matrix = getattr(self, name)
            if matrix is None:
                continue
            if len(matrix) != size or any(len(row) != size for row in matrix):
                raise ValueError(f"{name} matrix must be {size}x{size}")
        return self

    def unshifted_matrix(self) -> np.ndarray:
        return np.asarray(self.unshifted, dtype=float)

    def shifted_matrix(self) -> Optional[np.ndarray]:
        if self.shifted is None:
            return None
        return np.asarray(self.shifted, dtype=float)

    def raw_matrices(self) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """ゲージ変換を戻した行列 s_{m+n}, s_{m+n+1}"""
        log_a, log_c = self.log_scale
        idx = np.add.outer(np.arange(self.order + 1), np.arange(self.order + 1))
        unshifted = self.unshifted_matrix() * np.exp(log_a - idx * log_c)
        shifted = self.shifted_matrix()
        if shifted is not None:
            shifted = shifted * np.exp(log_a - (idx + 1) * log_c)
        return unshifted, shifted
