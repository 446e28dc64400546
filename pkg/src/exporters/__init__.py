# Report, data file and figure export module
from src.exporters.distribution_io import (
    DistributionFile,
    SequenceKind,
    from_distribution,
    parse_csv,
    parse_json,
    read_distribution_file,
    write_distribution_file,
)
from src.exporters.figure_data import FigureData, build_figure1, write_figure1
from src.exporters.report_exporter import (
    ReportExporter,
    ReportFormat,
    dump_report,
    export_report,
    load_report,
)

__all__ = [
    "DistributionFile",
    "SequenceKind",
    "parse_json",
    "parse_csv",
    "read_distribution_file",
    "write_distribution_file",
    "from_distribution",
    "ReportExporter",
    "ReportFormat",
    "dump_report",
    "load_report",
    "export_report",
    "FigureData",
    "build_figure1",
    "write_figure1",
]
