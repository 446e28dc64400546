"""
Data series for the classical-oscillation figure

Emits n, p_n and the gauge-rescaled q_n of the five-component coherent
mixture as plain CSV with a commented header. No plotting here.
"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.core.logmath import apply_gauge, gauge_parameters
from src.core.transforms import p_to_q
from src.generators.state_generator import coherent_mixture
from src.models.specs import FIG1_MIXTURE, CoherentMixtureSpec
from src.validators.local_conditions import check_oscillation_q, detect_oscillation_p

logger = logging.getLogger(__name__)

DEFAULT_FIGURE_NMAX = 200


class FigureData(BaseModel):
    """図用の二系列と、その生成条件"""
    model_config = ConfigDict(frozen=True)

    spec: CoherentMixtureSpec
    rows: Tuple[Tuple[int, float, float], ...]
    log_scale: Tuple[float, float]
    p_maxima: Tuple[int, ...]
    q_maxima: Tuple[int, ...]

    @property
    def nmax(self) -> int:
        return len(self.rows) - 1

    def header_lines(self) -> List[str]:
        log_a, log_c = self.log_scale
        weights = ", ".join(f"{w:g}" for w in self.spec.weights)
        intensities = ", ".join(f"{i:g}" for i in self.spec.intensities)
        return [
            "# classical oscillations: mixture of coherent states",
            f"# lambda: {weights}",
            f"# |alpha|^2: {intensities}",
            f"# q_scaled = q_n * exp(n * {log_c!r} - {log_a!r})",
            f"# interior maxima of p_n at n = {', '.join(map(str, self.p_maxima)) or 'none'}",
            f"# interior maxima of q_n at n = {', '.join(map(str, self.q_maxima)) or 'none'}",
        ]

    def render(self) -> str:
        lines = self.header_lines()
        lines.append("n,p_n,q_scaled")
        lines.extend(f"{n},{p!r},{q!r}" for n, p, q in self.rows)
        return "\n".join(lines) + "\n"


def build_figure1(spec: CoherentMixtureSpec = FIG1_MIXTURE, nmax: int = DEFAULT_FIGURE_NMAX) -> FigureData:
    """混合状態の p_n と、プロット用にゲージ変換した q_n を計算"""
    dist = coherent_mixture(spec, nmax)
    q = p_to_q(dist)
    logs = q.log_array()
    log_a, log_c = gauge_parameters(logs)
    with np.errstate(under="ignore"):
        scaled = np.exp(apply_gauge(logs, log_a, log_c))

    p_maxima = tuple(detect_oscillation_p(dist))
    q_maxima = tuple(w.indices[1] for w in check_oscillation_q(q).witnesses)
    logger.debug("figure data: %d p_n maxima, %d q_n maxima", len(p_maxima), len(q_maxima))
    rows = tuple((n, float(dist.values[n]), float(scaled[n])) for n in range(nmax + 1))
    return FigureData(spec=spec, rows=rows, log_scale=(log_a, log_c),
                      p_maxima=p_maxima, q_maxima=q_maxima)


def write_figure1(output_path: Path, nmax: Optional[int] = None) -> Path:
    """図データを書き出す（同じ入力なら同じバイト列）"""
    data = build_figure1(nmax=nmax if nmax is not None else DEFAULT_FIGURE_NMAX)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(data.render(), encoding="utf-8")
    return output_path
