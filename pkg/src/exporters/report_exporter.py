"""
Witness report export in JSON, plain text and Markdown
"""
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from jinja2 import Environment, FileSystemLoader
from pydantic import BaseModel, ConfigDict, ValidationError

from src.models.errors import InputFormatError
from src.models.report import CheckCoverage, CheckName, Witness, WitnessReport

logger = logging.getLogger(__name__)


class ReportFormat(str, Enum):
    JSON = "json"
    TEXT = "text"
    MARKDOWN = "markdown"


class ReportTemplateConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    template_dir: Path = Path(__file__).parent / "report_templates"
    number_digits: int = 6


TEMPLATE_NAMES: Dict[ReportFormat, str] = {
    ReportFormat.TEXT: "report.txt.j2",
    ReportFormat.MARKDOWN: "report.md.j2",
}


def _witness_dict(witness: Witness) -> Dict[str, Any]:
    return {
        "indices": list(witness.indices),
        "lhs": witness.lhs,
        "rhs": witness.rhs,
        "margin": witness.margin,
        "log_scale": witness.log_scale,
        "detail": witness.detail,
    }


def report_to_dict(report: WitnessReport) -> Dict[str, Any]:
    """レポートを JSON スキーマの辞書に変換

    Witnesses are attached to the first test entry of their check; tests
    keep the order in which the battery ran them.
    """
    tests: List[Dict[str, Any]] = []
    owner: Dict[CheckName, Dict[str, Any]] = {}
    for run in report.tests_run:
        entry = {
            "name": run.check.value,
            "window": list(run.window),
            "max_order": run.max_order,
            "witnesses": [],
        }
        tests.append(entry)
        owner.setdefault(run.check, entry)
    for witness in report.witnesses:
        entry = owner.get(witness.check)
        if entry is None:
            # 実行記録のない検査の証拠（外部で組み立てたレポート）
            entry = {"name": witness.check.value, "window": None, "max_order": None, "witnesses": []}
            tests.append(entry)
            owner[witness.check] = entry
        entry["witnesses"].append(_witness_dict(witness))
    return {
        "verdict": report.verdict.value,
        "tolerance": report.tolerance_used,
        "tests": tests,
    }


def dump_report(report: WitnessReport) -> str:
    """JSON 文字列に変換（決定的な出力）"""
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


def load_report(text: str) -> WitnessReport:
    """dump_report の出力からレポートを復元"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(e.msg, line=e.lineno) from e
    if not isinstance(data, dict):
        raise InputFormatError("report must be a JSON object", line=1)

    try:
        witnesses: List[Witness] = []
        coverage: List[CheckCoverage] = []
        for n, test in enumerate(data["tests"]):
            check = CheckName(test["name"])
            if test.get("window") is not None:
                coverage.append(CheckCoverage(
                    check=check, window=tuple(test["window"]), max_order=test.get("max_order")
                ))
            for w in test.get("witnesses", []):
                witnesses.append(Witness(check=check, indices=tuple(w["indices"]), lhs=w["lhs"],
                                         rhs=w["rhs"], margin=w["margin"],
                                         log_scale=w.get("log_scale", 0.0), detail=w.get("detail", "")))
        report = WitnessReport(
            verdict=data["verdict"],
            witnesses=tuple(witnesses),
            tests_run=tuple(coverage),
            tolerance_used=data["tolerance"],
        )
    except KeyError as e:
        raise InputFormatError("missing key in report", field=str(e.args[0])) from e
    except (ValidationError, ValueError, TypeError) as e:
        raise InputFormatError(f"invalid report: {e}") from e
    return report


class ReportExporter:
    """判定レポートを各形式で出力するクラス"""

    def __init__(self, config: Optional[ReportTemplateConfig] = None):
        self.config = config or ReportTemplateConfig()
        self.env = Environment(
            loader=FileSystemLoader(str(self.config.template_dir)),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            autoescape=False,
        )
        self._setup_filters()
        self.supported_formats = [f.value for f in ReportFormat]

    def _setup_filters(self) -> None:
        """Jinja2カスタムフィルターの設定"""
        self.env.filters['sci'] = self._sci
        self.env.filters['indices'] = self._indices

    def _sci(self, value: float) -> str:
        """有効数字を揃えた数値表記"""
        return f"{value:.{self.config.number_digits}g}"

    @staticmethod
    def _indices(values: List[int]) -> str:
        return ", ".join(str(v) for v in values)

    def export(self, report: WitnessReport, format: str) -> str:
        """指定形式で出力"""
        try:
            fmt = ReportFormat(format)
        except ValueError:
            raise ValueError(f"Unsupported format: {format}. Supported: {self.supported_formats}")

        if fmt == ReportFormat.JSON:
            return dump_report(report)
        return self._render(report, fmt)

    def export_to_json(self, report: WitnessReport) -> str:
        return dump_report(report)

    def export_to_text(self, report: WitnessReport) -> str:
        return self._render(report, ReportFormat.TEXT)

    def export_to_markdown(self, report: WitnessReport) -> str:
        return self._render(report, ReportFormat.MARKDOWN)

    def _render(self, report: WitnessReport, fmt: ReportFormat) -> str:
        template = self.env.get_template(TEMPLATE_NAMES[fmt])
        context = report_to_dict(report)
        context["nonclassical"] = report.is_nonclassical
        context["witness_count"] = len(report.witnesses)
        return template.render(**context)

    def save(self, report: WitnessReport, format: str, output_path: Path) -> Path:
        """レポートをファイルに保存"""
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(self.export(report, format), encoding="utf-8")
        logger.debug("report written to %s", output_path)
        return output_path


# 便利関数
def export_report(report: WitnessReport, format: str = "text") -> str:
    """レポートを文字列に変換"""
    return ReportExporter().export(report, format)
