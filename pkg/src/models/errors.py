"""
Domain errors for photon distribution analysis
"""
from typing import Optional


class NonclassicalityError(Exception):
    """解析ライブラリの基底例外"""


class NegativeProbability(NonclassicalityError):
    """許容範囲を超える負の確率"""

    def __init__(self, n: int, value: float):
        super().__init__(f"p_{n} = {value!r} is negative beyond zero_tol")
        self.n = n
        self.value = value


class NormalizationViolation(NonclassicalityError):
    """正規化条件の違反"""

    def __init__(self, total: float, policy: str = "exact"):
        super().__init__(
            f"sum of p_n is {total!r}, which violates the '{policy}' normalization policy"
        )
        self.total = total
        self.policy = policy


class WindowTooShort(NonclassicalityError):
    """データ窓が演算に対して短すぎる"""

    def __init__(self, required: int, available: int, context: str = ""):
        where = f" for {context}" if context else ""
        super().__init__(
            f"window too short{where}: need index {required}, data ends at {available}"
        )
        self.required = required
        self.available = available
        self.context = context


class DivergentTail(NonclassicalityError):
    """階乗モーメントの裾が窓の端で収束しない"""

    def __init__(self, n: int, ratio: Optional[float] = None):
        detail = f" (edge term ratio {ratio:.3g})" if ratio is not None else ""
        super().__init__(f"factorial moment gamma_{n} is unreliable in this window{detail}")
        self.n = n
        self.ratio = ratio


class DegenerateCat(NonclassicalityError):
    """二成分重ね合わせがゼロベクトルになる"""

    def __init__(self, intensity: float, theta: float):
        super().__init__(
            f"cat state with |z0|^2={intensity!r}, theta={theta!r} is the null vector"
        )
        self.intensity = intensity
        self.theta = theta


class QuadratureNotConverged(NonclassicalityError):
    """数値積分が収束しない"""

    def __init__(self, n: int, change: float):
        super().__init__(
            f"quadrature for moment {n} did not converge (last relative change {change:.3g})"
        )
        self.n = n
        self.change = change


class InputFormatError(NonclassicalityError):
    """入力ファイルの形式エラー"""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field
