import logging
from pathlib import Path
from typing import Any, Dict, FrozenSet, Optional

import click
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from src.config.settings import Settings, get_settings, reload_settings, setup_logging
from src.data import available_fixtures, load_fixture
from src.exporters.distribution_io import (
    DistributionFile,
    SequenceKind,
    dumps_json,
    from_distribution,
    read_distribution_file,
    write_distribution_file,
)
from src.exporters.figure_data import build_figure1
from src.exporters.report_exporter import ReportExporter, ReportFormat
from src.generators.state_generator import MIXTURE_PRESETS, StateGenerator, StateKind
from src.models.distribution import NormPolicy
from src.models.errors import NonclassicalityError
from src.models.report import CheckName, WitnessReport
from src.validators.base_validator import BatteryConfig
from src.validators.battery import ClassicalityBattery

console = Console()
logger = logging.getLogger(__name__)

EXIT_NO_VIOLATION = 0
EXIT_ERROR = 1
EXIT_NONCLASSICAL = 2


class ExitCodeGroup(click.Group):
    """使い方の誤りも終了コード 1 にする（2 は NONCLASSICAL 専用）"""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise


def _load_settings(config: Optional[Path], verbose: bool) -> Settings:
    settings = reload_settings(config) if config else get_settings()
    setup_logging("DEBUG" if verbose else settings.logging.level)
    return settings


def _parse_tests(value: Optional[str]) -> Optional[FrozenSet[CheckName]]:
    if not value:
        return None
    if value.strip() == "all":
        return frozenset(CheckName)
    checks = set()
    for name in (part.strip() for part in value.split(",")):
        if not name:
            continue
        try:
            checks.add(CheckName(name))
        except ValueError:
            choices = ", ".join(c.value for c in CheckName)
            raise click.BadParameter(f"unknown check '{name}' (choose from: {choices}, all)",
                                     param_hint="--tests")
    return frozenset(checks)


@click.group(cls=ExitCodeGroup)
@click.version_option(version="0.1.0", prog_name="nonclassicality")
def cli():
    """光子数分布から位相に依存しない非古典性を検出するツール

    \b
    終了コード: 0 = 違反なし, 2 = 非古典的, 1 = 入力・使い方のエラー
    """
    pass


@cli.command()
@click.argument("input_path", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--fixture", type=click.Choice(available_fixtures()), help="同梱データを入力に使う")
@click.option("--kind", type=click.Choice([k.value for k in SequenceKind]),
              help="列の種類（CSV、または kind のない JSON 用）")
@click.option("--tol", type=float, help="固有値・不等式の相対許容誤差")
@click.option("--max-order", type=click.IntRange(min=0), help="ハンケル行列の最大次数")
@click.option("--tests", help="実行する検査（カンマ区切り、または all）")
@click.option("--report", "report_format", type=click.Choice([f.value for f in ReportFormat]),
              help="レポート形式")
@click.option("--zero-tol", type=float, help="ゼロとみなす相対閾値")
@click.option("--norm-policy", type=click.Choice([p.value for p in NormPolicy]), help="正規化の扱い")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), help="レポートの出力先")
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="設定ファイル")
@click.option("--verbose", "-v", is_flag=True, help="詳細ログを表示")
@click.pass_context
def check(
    ctx: click.Context,
    input_path: Optional[Path],
    fixture: Optional[str],
    kind: Optional[str],
    tol: Optional[float],
    max_order: Optional[int],
    tests: Optional[str],
    report_format: Optional[str],
    zero_tol: Optional[float],
    norm_policy: Optional[str],
    output: Optional[Path],
    config: Optional[Path],
    verbose: bool,
):
    """分布ファイルに古典性の必要条件を適用して判定"""
    if (input_path is None) == (fixture is None):
        raise click.UsageError("give exactly one of INPUT_PATH or --fixture")
    settings = _load_settings(config, verbose)
    enabled = _parse_tests(tests)

    try:
        cfg = BatteryConfig.from_settings(settings, psd_tol=tol, max_hankel_order=max_order,
                                          enabled_checks=enabled)
        if input_path is not None:
            doc = read_distribution_file(input_path, SequenceKind(kind) if kind else None)
        else:
            doc = load_fixture(fixture)
        report = _run_checks(doc, cfg, settings, zero_tol, norm_policy)
    except NonclassicalityError as e:
        raise click.ClickException(str(e))
    except ValidationError as e:
        raise click.ClickException(f"invalid parameters: {e.errors()[0]['msg']}")

    fmt = report_format or settings.report.default_format
    text = ReportExporter().export(report, fmt)
    if output:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")
        console.print(f"[bold]判定:[/bold] {report.verdict.value}  [dim]({output})[/dim]")
    elif fmt == ReportFormat.JSON.value:
        click.echo(text, nl=False)
    else:
        style = "red" if report.is_nonclassical else "green"
        console.print(Panel(Text(text.rstrip("\n")), title="判定レポート", border_style=style))

    ctx.exit(EXIT_NONCLASSICAL if report.is_nonclassical else EXIT_NO_VIOLATION)


def _run_checks(
    doc: DistributionFile,
    cfg: BatteryConfig,
    settings: Settings,
    zero_tol: Optional[float],
    norm_policy: Optional[str],
) -> WitnessReport:
    battery = ClassicalityBattery(cfg)
    if doc.kind == SequenceKind.GAMMA:
        return battery.run_factorial(doc.to_factorial_moments())
    # フラグ > ファイルの指定 > 設定
    dist = doc.to_distribution(
        zero_tol=zero_tol,
        norm_policy=NormPolicy(norm_policy) if norm_policy else None,
        default_zero_tol=settings.tolerances.zero_tol,
        norm_tol=settings.tolerances.norm_tol,
    )
    return battery.run(dist, doc.to_moments())


@cli.command()
@click.option("--state", "-s", type=click.Choice([k.value for k in StateKind]), required=True,
              help="生成する状態")
@click.option("--intensity", type=float, help="|z0|^2（coherent, cat）")
@click.option("--mean", type=float, help="平均光子数（thermal）")
@click.option("--m", type=click.IntRange(min=0), help="光子数（fock）")
@click.option("--theta", type=float, help="重ね合わせの相対位相（cat）")
@click.option("--spec", type=click.Choice(sorted(MIXTURE_PRESETS)), help="混合状態のプリセット（mixture）")
@click.option("--base", type=click.Choice([k.value for k in StateKind if k != StateKind.PHOTON_ADDED]),
              help="光子付加の元になる状態（photon-added）")
@click.option("--added", type=click.IntRange(min=0), help="付加する光子数（photon-added）")
@click.option("--nmax", type=click.IntRange(min=0), help="窓の終端（省略時は自動）")
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path),
              help="出力ファイル（.json または .csv、省略時は標準出力）")
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="設定ファイル")
@click.option("--verbose", "-v", is_flag=True, help="詳細ログを表示")
def gen(
    state: str,
    intensity: Optional[float],
    mean: Optional[float],
    m: Optional[int],
    theta: Optional[float],
    spec: Optional[str],
    base: Optional[str],
    added: Optional[int],
    nmax: Optional[int],
    output: Optional[Path],
    config: Optional[Path],
    verbose: bool,
):
    """解析的な状態の光子数分布を生成"""
    settings = _load_settings(config, verbose)
    given = {"intensity": intensity, "mean": mean, "m": m, "theta": theta,
             "spec": spec, "base": base, "added": added}
    params: Dict[str, Any] = {k: v for k, v in given.items() if v is not None}
    generator = StateGenerator(
        settings.generators.window_sigmas,
        settings.generators.min_nmax,
        settings.generators.photon_added_tail_tol,
    )

    try:
        dist = generator.generate(StateKind(state), params, nmax)
    except KeyError as e:
        option = e.args[0] if e.args[0] in given else "spec"
        raise click.UsageError(f"--{option} is required for --state {state}")
    except NonclassicalityError as e:
        raise click.ClickException(str(e))
    except (ValidationError, ValueError) as e:
        raise click.ClickException(f"invalid parameters: {e}")

    doc = from_distribution(dist)
    if output:
        write_distribution_file(doc, output)
        console.print(f"[bold green]✓[/bold green] {state} (nmax={dist.nmax}) を {output} に出力しました")
    else:
        click.echo(dumps_json(doc), nl=False)


@cli.command()
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=Path("figure1.csv"),
              show_default=True, help="出力ファイル")
@click.option("--nmax", type=click.IntRange(min=2), help="窓の終端")
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="設定ファイル")
def figure1(output: Path, nmax: Optional[int], config: Optional[Path]):
    """古典的振動の図データ（n, p_n, 変換後の q_n）を出力"""
    settings = _load_settings(config, False)
    data = build_figure1(nmax=nmax if nmax is not None else settings.generators.figure_nmax)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(data.render(), encoding="utf-8")

    console.print(Panel.fit(
        f"[bold]ファイル:[/bold] {output}\n"
        f"[bold]p_n の内部極大:[/bold] {len(data.p_maxima)}\n"
        f"[bold]q_n の内部極大:[/bold] {len(data.q_maxima)}",
        title="図データ出力完了",
        border_style="green"
    ))


@cli.command(name="list-checks")
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="設定ファイル")
def list_checks(config: Optional[Path]):
    """利用可能な検査の一覧を表示"""
    settings = _load_settings(config, False)
    battery = ClassicalityBattery(BatteryConfig.from_settings(settings))

    table = Table(title="古典性の必要条件", show_lines=True)
    table.add_column("検査", style="cyan", no_wrap=True)
    table.add_column("条件", style="green")
    table.add_column("最小の窓終端", justify="center", style="yellow")
    table.add_column("既定で有効", justify="center")
    table.add_column("入力", justify="center")

    for item in battery.get_available_checks():
        table.add_row(
            item["name"],
            item["condition"],
            str(item["min_window_end"]),
            "✓" if item["enabled"] else "",
            "γ_n" if item["factorial"] else "p_n / q_n",
        )

    console.print(table)


def main():
    """メインエントリーポイント"""
    cli()


if __name__ == "__main__":
    main()
