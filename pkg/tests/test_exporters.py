"""
Exporter tests: reports, data files and figure data
"""
import json

import pytest

from src.exporters.distribution_io import (
    DistributionFile,
    SequenceKind,
    dumps_csv,
    dumps_json,
    from_distribution,
    parse_csv,
    parse_json,
    read_distribution_file,
    write_distribution_file,
)
from src.exporters.figure_data import build_figure1, write_figure1
from src.exporters.report_exporter import (
    ReportExporter,
    ReportFormat,
    dump_report,
    export_report,
    load_report,
    report_to_dict,
)
from src.generators.state_generator import coherent, photon_added, thermal
from src.models.distribution import NormPolicy
from src.models.errors import InputFormatError
from src.models.report import CheckCoverage, CheckName, Verdict, Witness, WitnessReport
from src.models.specs import PhotonAddedSpec
from src.validators.battery import run_battery


@pytest.fixture
def schiller_report(schiller_file):
    return run_battery(schiller_file.to_distribution(), moments=schiller_file.to_moments())


@pytest.fixture
def clean_report(coherent_dist):
    return run_battery(coherent_dist)


class TestReportJson:
    """JSON レポートのテスト"""

    def test_schema(self, schiller_report):
        data = json.loads(dump_report(schiller_report))

        assert data["verdict"] == "NONCLASSICAL"
        assert data["tolerance"] == schiller_report.tolerance_used
        names = [t["name"] for t in data["tests"]]
        assert names == [run.check.value for run in schiller_report.tests_run]
        first = next(t for t in data["tests"] if t["name"] == "first_order")
        assert first["witnesses"][0]["indices"] == [1, 2, 3]
        assert set(first["witnesses"][0]) == {"indices", "lhs", "rhs", "margin", "log_scale", "detail"}

    def test_round_trip_is_byte_identical(self, schiller_report):
        text = dump_report(schiller_report)
        restored = load_report(text)

        assert restored == schiller_report
        assert dump_report(restored) == text

    def test_clean_report_round_trip(self, clean_report):
        text = dump_report(clean_report)

        assert load_report(text).verdict == Verdict.NO_VIOLATION_FOUND
        assert dump_report(load_report(text)) == text

    def test_orphan_witness_gets_entry(self):
        witness = Witness(check=CheckName.ZEROS, indices=(0,), lhs=0.0, rhs=1.0, margin=-1.0)
        report = WitnessReport(verdict=Verdict.NONCLASSICAL, witnesses=(witness,), tolerance_used=1e-9)

        tests = report_to_dict(report)["tests"]
        assert tests == [{
            "name": "zeros",
            "window": None,
            "max_order": None,
            "witnesses": [{
                "indices": [0], "lhs": 0.0, "rhs": 1.0, "margin": -1.0, "log_scale": 0.0, "detail": "",
            }],
        }]
        assert load_report(dump_report(report)).witnesses == (witness,)

    def test_output_is_deterministic(self, schiller_file):
        first = dump_report(run_battery(schiller_file.to_distribution(), moments=schiller_file.to_moments()))
        second = dump_report(run_battery(schiller_file.to_distribution(), moments=schiller_file.to_moments()))

        assert first == second


class TestLoadReportErrors:
    """レポート読み込みのエラー"""

    def test_malformed_json(self):
        with pytest.raises(InputFormatError) as exc_info:
            load_report('{\n  "verdict": "NONCLASSICAL",\n  "tests": [,]\n}')
        assert exc_info.value.line == 3

    def test_not_an_object(self):
        with pytest.raises(InputFormatError):
            load_report("[1, 2]")

    def test_missing_key(self):
        with pytest.raises(InputFormatError) as exc_info:
            load_report('{"verdict": "NO_VIOLATION_FOUND", "tests": []}')
        assert exc_info.value.field == "tolerance"

    def test_inconsistent_verdict(self):
        with pytest.raises(InputFormatError):
            load_report('{"verdict": "NONCLASSICAL", "tolerance": 1e-9, "tests": []}')

    def test_unknown_check(self):
        with pytest.raises(InputFormatError):
            load_report('{"verdict": "NO_VIOLATION_FOUND", "tolerance": 1e-9, '
                        '"tests": [{"name": "bogus", "window": [0, 3], "witnesses": []}]}')


class TestReportExporter:
    """ReportExporter のテスト"""

    def test_supported_formats(self):
        exporter = ReportExporter()

        assert exporter.supported_formats == ["json", "text", "markdown"]

    def test_unsupported_format(self, clean_report):
        with pytest.raises(ValueError, match="Unsupported format"):
            ReportExporter().export(clean_report, "pdf")

    def test_json_matches_dump(self, schiller_report):
        assert ReportExporter().export(schiller_report, "json") == dump_report(schiller_report)

    def test_text_nonclassical(self, schiller_report):
        text = ReportExporter().export_to_text(schiller_report)

        assert text.startswith("verdict: NONCLASSICAL\n")
        assert "[first_order]" in text
        assert "indices (1, 2, 3)" in text
        assert f"witnesses: {len(schiller_report.witnesses)}" in text

    def test_text_clean(self, clean_report):
        text = export_report(clean_report, "text")

        assert "verdict: NO_VIOLATION_FOUND" in text
        assert "no violation" in text
        assert "margin =" not in text

    def test_markdown(self, schiller_report, clean_report):
        exporter = ReportExporter()
        markdown = exporter.export_to_markdown(schiller_report)

        assert markdown.startswith("# 非古典性判定レポート")
        assert "## 証拠" in markdown
        assert "| first_order | 1, 2, 3 |" in markdown
        assert "## 証拠" not in exporter.export(clean_report, ReportFormat.MARKDOWN.value)

    def test_window_and_order_rendered(self):
        report = WitnessReport.from_checks(
            [], [CheckCoverage(check=CheckName.HANKEL_Q, window=(0, 8), max_order=4)], 1e-9
        )

        text = export_report(report, "text")
        assert "[hankel_q] window n = 0..8, N <= 4" in text

    def test_save(self, schiller_report, temp_dir):
        path = ReportExporter().save(schiller_report, "json", temp_dir / "out" / "report.json")

        assert path.exists()
        assert load_report(path.read_text(encoding="utf-8")) == schiller_report


class TestParseJson:
    """JSON データファイルの解析"""

    def test_minimal(self):
        doc = parse_json('{"values": [0.5, 0.25, 0.25]}')

        assert doc.kind == SequenceKind.P
        assert doc.values == (0.5, 0.25, 0.25)
        assert doc.zero_tol is None

    def test_kind_argument_fills_missing_kind(self):
        assert parse_json('{"values": [1, 2]}', SequenceKind.Q).kind == SequenceKind.Q
        assert parse_json('{"kind": "gamma", "values": [1, 2]}', SequenceKind.Q).kind == SequenceKind.GAMMA

    def test_file_settings(self):
        doc = parse_json('{"values": [0.5, 0.5], "zero_tol": 1e-6, "norm_policy": "exact"}')
        dist = doc.to_distribution()

        assert dist.zero_tol == 1e-6
        assert dist.norm_policy == NormPolicy.EXACT

    def test_explicit_settings_override_file(self):
        doc = parse_json('{"values": [0.5, 0.5], "zero_tol": 1e-6, "norm_policy": "exact"}')
        dist = doc.to_distribution(zero_tol=0.25, norm_policy=NormPolicy.TRUNCATED)

        assert dist.zero_tol == 0.25
        assert dist.norm_policy == NormPolicy.TRUNCATED

    def test_default_when_file_is_silent(self):
        dist = parse_json('{"values": [0.5, 0.5]}').to_distribution(default_zero_tol=1e-3)

        assert dist.zero_tol == 1e-3

    def test_log_values_keep_underflowed_tail(self):
        doc = parse_json('{"values": [1.0, 0.0, 0.0], "log_values": [0.0, -800.0, null]}')
        dist = doc.to_distribution(zero_tol=0.0)

        assert dist.values[1] == 0.0
        assert dist.zero_indices() == [2]

    def test_log_values_need_kind_p(self):
        with pytest.raises(InputFormatError):
            parse_json('{"kind": "q", "values": [1.0, 1.0], "log_values": [0.0, 0.0]}')

    def test_log_values_length(self):
        with pytest.raises(InputFormatError):
            parse_json('{"values": [0.5, 0.5], "log_values": [-0.6931471805599453]}')

    def test_decode_error_has_line(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_json('{\n  "values": [0.5,\n    0.5,]\n}')
        assert exc_info.value.line == 3

    def test_missing_values(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_json('{"kind": "p"}')
        assert exc_info.value.field == "values"

    @pytest.mark.parametrize("bad", ['"x"', "true", "null", "[1]"])
    def test_bad_entry_has_field(self, bad):
        with pytest.raises(InputFormatError) as exc_info:
            parse_json('{"values": [0.5, %s]}' % bad)
        assert exc_info.value.field == "values[1]"

    def test_empty_values(self):
        with pytest.raises(InputFormatError):
            parse_json('{"values": []}')

    def test_unknown_key(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_json('{"values": [1.0], "comment": "x"}')
        assert exc_info.value.field == "comment"

    def test_unknown_kind(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_json('{"kind": "r", "values": [1.0]}')
        assert exc_info.value.field == "kind"


class TestParseCsv:
    """CSV データファイルの解析"""

    def test_with_header_and_comments(self):
        text = "# measured\nn,value\n0,0.5\n1,0.3\n\n2,0.2\n"

        assert parse_csv(text).values == (0.5, 0.3, 0.2)

    def test_without_header(self):
        doc = parse_csv("0,1.0\n1,2.0\n", SequenceKind.Q)

        assert doc.kind == SequenceKind.Q
        assert doc.values == (1.0, 2.0)

    def test_wrong_column_count(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_csv("n,value\n0,0.5,1\n")
        assert exc_info.value.line == 2

    def test_skipped_index(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_csv("0,0.5\n2,0.1\n")
        assert (exc_info.value.line, exc_info.value.field) == (2, "n")

    def test_bad_number(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_csv("n,value\n0,0.5\n1,abc\n")
        assert (exc_info.value.line, exc_info.value.field) == (3, "value")

    def test_non_finite(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_csv("0,0.5\n1,nan\n")
        assert exc_info.value.field == "value"

    def test_log_column(self):
        doc = parse_csv("n,value,log_value\n0,1.0,0.0\n1,0.0,-800.0\n2,0.0,-inf\n")

        assert doc.values == (1.0, 0.0, 0.0)
        assert doc.log_values == (0.0, -800.0, float("-inf"))

    def test_mixed_column_counts(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_csv("0,1.0,0.0\n1,0.0\n")
        assert exc_info.value.line == 2

    def test_bad_log_cell(self):
        with pytest.raises(InputFormatError) as exc_info:
            parse_csv("0,1.0,nan\n")
        assert exc_info.value.field == "log_value"

    def test_no_rows(self):
        with pytest.raises(InputFormatError):
            parse_csv("n,value\n# nothing\n")


class TestDistributionConversion:
    """DistributionFile の変換"""

    def test_q_to_distribution(self, schiller_file):
        dist = schiller_file.to_distribution()

        assert dist.values[0] == pytest.approx(0.44)
        assert dist.values[3] == pytest.approx(0.30 / 6)
        assert dist.values[6] == pytest.approx(28.80 / 720)

    def test_q_moments_are_the_input(self, schiller_file):
        q = schiller_file.to_moments()

        assert q.values() == pytest.approx(list(schiller_file.values), rel=1e-12)

    def test_p_has_no_moments(self):
        assert DistributionFile(values=(0.5, 0.5)).to_moments() is None

    def test_gamma(self):
        doc = DistributionFile(kind=SequenceKind.GAMMA, values=(1.0, 2.0, 8.0))

        assert doc.to_factorial_moments().finite_through == 2
        with pytest.raises(InputFormatError):
            doc.to_distribution()

    def test_factorial_of_p_rejected(self):
        with pytest.raises(InputFormatError):
            DistributionFile(values=(1.0,)).to_factorial_moments()

    def test_negative_q_rejected(self):
        with pytest.raises(InputFormatError) as exc_info:
            DistributionFile(kind=SequenceKind.Q, values=(1.0, -0.5)).to_distribution()
        assert exc_info.value.field == "values[1]"


class TestDistributionWrite:
    """データファイルの書き出し"""

    @pytest.mark.parametrize("suffix", [".json", ".csv"])
    def test_bit_faithful(self, suffix, temp_dir):
        dist = thermal(2.0, 30)
        path = write_distribution_file(from_distribution(dist), temp_dir / f"thermal{suffix}")

        restored = read_distribution_file(path).to_distribution()
        assert restored.values == dist.values

    @pytest.mark.parametrize("suffix", [".json", ".csv"])
    def test_underflowed_tail_survives(self, suffix, temp_dir):
        """倍精度で 0 になる裾も log_values で非ゼロのまま戻る"""
        dist = coherent(0.5, 200)
        path = write_distribution_file(from_distribution(dist), temp_dir / f"coherent{suffix}")

        restored = read_distribution_file(path).to_distribution(zero_tol=0.0)
        assert restored.values[-1] == 0.0
        assert restored.log_values == dist.log_values
        assert restored.zero_indices() == []

    def test_exact_zero_log_is_null(self):
        dist = photon_added(PhotonAddedSpec(base=thermal(1.0, 80), m=1), 60)
        data = json.loads(dumps_json(from_distribution(dist)))

        assert data["log_values"][0] is None
        restored = parse_json(json.dumps(data)).to_distribution()
        assert restored.zero_indices() == [0]

    def test_json_keeps_settings(self):
        dist = thermal(1.0, 10)
        data = json.loads(dumps_json(from_distribution(dist)))

        assert data["kind"] == "p"
        assert data["zero_tol"] == dist.zero_tol
        assert data["norm_policy"] == dist.norm_policy.value

    def test_csv_layout(self):
        text = dumps_csv(DistributionFile(values=(0.5, 0.25, 0.25)))

        assert text == "n,value\n0,0.5\n1,0.25\n2,0.25\n"

    def test_unreadable_path(self, temp_dir):
        with pytest.raises(InputFormatError):
            read_distribution_file(temp_dir / "missing.json")


class TestFigureData:
    """古典的振動の図データ"""

    def test_header(self):
        lines = build_figure1().header_lines()

        assert "# lambda: 0.25, 0.25, 0.2, 0.18, 0.12" in lines
        assert "# |alpha|^2: 10, 30, 60, 90, 130" in lines
        assert lines[-1] == "# interior maxima of q_n at n = none"

    def test_rows(self):
        data = build_figure1(nmax=200)

        assert data.nmax == 200
        assert [row[0] for row in data.rows] == list(range(201))
        assert all(p >= 0 and q >= 0 for _, p, q in data.rows)
        assert max(q for _, _, q in data.rows) == pytest.approx(1.0)

    def test_p_oscillates_q_does_not(self):
        data = build_figure1()

        assert len(data.p_maxima) >= 2
        assert data.q_maxima == ()

    def test_render_columns(self):
        lines = build_figure1(nmax=50).render().splitlines()
        body = [line for line in lines if not line.startswith("#")]

        assert body[0] == "n,p_n,q_scaled"
        assert len(body) == 52
        assert all(len(line.split(",")) == 3 for line in body)

    def test_byte_identical(self, temp_dir):
        first = write_figure1(temp_dir / "a.csv").read_bytes()
        second = write_figure1(temp_dir / "b.csv").read_bytes()

        assert first == second
