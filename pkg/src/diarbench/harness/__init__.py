"""Benchmark orchestration: adapters, run records, reports."""

from .adapters import AdapterConfig, AdapterKind, parse_result, run_meta, run_system
from .mockserver import MockDiarizationServer
from .records import RunMeta, RunRecord, RunStatus, append_records, read_run, write_run
from .report import (
    DeltaRow,
    Report,
    compare_runs,
    emit_report,
    evaluate_run,
    load_report,
    plot_points,
    report_from_json,
    report_to_json,
)

__all__ = [
    "AdapterConfig",
    "AdapterKind",
    "DeltaRow",
    "MockDiarizationServer",
    "Report",
    "RunMeta",
    "RunRecord",
    "RunStatus",
    "append_records",
    "compare_runs",
    "emit_report",
    "evaluate_run",
    "load_report",
    "parse_result",
    "plot_points",
    "read_run",
    "report_from_json",
    "report_to_json",
    "run_meta",
    "run_system",
    "write_run",
]
