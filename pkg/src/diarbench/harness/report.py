"""Scoring run records into reports, serializing them, and comparing runs."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..core import Annotation, Tick, Uem
from ..errors import ManifestMismatch, MissingReference, ReportInconsistent
from ..ingest import Manifest
from ..metrics import (
    CategoryKey,
    CategoryKind,
    DerComponents,
    SpeedFactor,
    aggregate_global,
    category_of,
    der_components,
    speed_factor,
)
from .records import RunMeta, RunRecord

REPORT_SCHEMA = "diarbench.report/1"


@dataclass(frozen=True)
class FileRow:
    recording_id: str
    components: DerComponents
    audio: Tick
    upload: Tick
    processing: Tick
    download: Tick

    @property
    def completion(self) -> Tick:
        return self.upload + self.processing + self.download


@dataclass(frozen=True)
class CategoryRow:
    key: CategoryKey
    components: DerComponents
    audio: Tick
    completion: Tick


@dataclass(frozen=True)
class FailedRow:
    recording_id: str
    status: str
    message: str


@dataclass(frozen=True)
class Report:
    meta: RunMeta
    collar: Tick
    files: tuple[FileRow, ...]
    global_components: DerComponents
    categories: tuple[CategoryRow, ...]
    failed: tuple[FailedRow, ...]

    @property
    def audio(self) -> Tick:
        return sum(row.audio for row in self.files)

    @property
    def completion(self) -> Tick:
        return sum(row.completion for row in self.files)

    @property
    def speed_factor(self) -> SpeedFactor | None:
        return speed_factor(self.audio, self.completion) if self.completion > 0 else None

    def check(self) -> None:
        if aggregate_global(row.components for row in self.files) != self.global_components:
            raise ReportInconsistent("global row differs from the sum of per-file rows")


def evaluate_run(
    records: Iterable[RunRecord],
    references: Mapping[str, Annotation],
    manifest: Manifest,
    collar: Tick = 0,
    uems: Mapping[str, Uem] | None = None,
    meta: RunMeta | None = None,
) -> Report:
    """Score ok records; timeouts and errors are listed but excluded from DER and speed."""
    records = list(records)
    uems = uems or {}
    files, failed = [], []
    for record in records:
        if not record.ok:
            failed.append(FailedRow(record.recording_id, record.status.value, record.message))
            continue
        if record.recording_id not in references:
            raise MissingReference(record.recording_id)
        comps = der_components(
            references[record.recording_id], record.hypothesis, uems.get(record.recording_id), collar
        )
        files.append(
            FileRow(record.recording_id, comps, record.audio_duration, record.upload, record.processing,
                    record.download)
        )
    categories = []
    for kind in CategoryKind:
        groups: dict[CategoryKey, list[FileRow]] = {}
        for row in files:
            groups.setdefault(category_of(row.recording_id, kind, manifest, references), []).append(row)
        for key in sorted(groups):
            rows = groups[key]
            categories.append(
                CategoryRow(key, aggregate_global(r.components for r in rows), sum(r.audio for r in rows),
                            sum(r.completion for r in rows))
            )
    if meta is None:
        tag = records[0].system_tag if records else ""
        meta = RunMeta(system_tag=tag, manifest_hash=manifest.digest,
                       started_at=min((r.started_at for r in records), default=""))
    return Report(
        meta=meta,
        collar=collar,
        files=tuple(files),
        global_components=aggregate_global(row.components for row in files),
        categories=tuple(categories),
        failed=tuple(failed),
    )


def _der(comps: DerComponents) -> float | None:
    return float(comps.der()) if comps.denominator > 0 else None


def _speed(audio: Tick, completion: Tick) -> float | None:
    return float(Fraction(audio, completion)) if completion > 0 else None


def _row_dict(comps: DerComponents, audio: Tick, completion: Tick) -> dict:
    return {**comps.as_dict(), "der": _der(comps), "audio": audio, "completion": completion,
            "speed_factor": _speed(audio, completion)}


def report_to_json(report: Report) -> dict:
    meta = report.meta
    return {
        "schema": REPORT_SCHEMA,
        "meta": {
            "system_tag": meta.system_tag,
            "config_hash": meta.config_hash,
            "manifest_hash": meta.manifest_hash,
            "timestamp": meta.started_at,
        },
        "collar": report.collar,
        "files": [
            {"recording_id": r.recording_id, "upload": r.upload, "processing": r.processing,
             "download": r.download, **_row_dict(r.components, r.audio, r.completion)}
            for r in report.files
        ],
        "global": _row_dict(report.global_components, report.audio, report.completion),
        "categories": [
            {"kind": r.key.kind.value, "value": r.key.value, **_row_dict(r.components, r.audio, r.completion)}
            for r in report.categories
        ],
        "failed": [{"recording_id": f.recording_id, "status": f.status, "message": f.message} for f in report.failed],
    }


def _components(d: dict) -> DerComponents:
    return DerComponents(d["false_alarm"], d["missed"], d["confusion"], d["denominator"])


def report_from_json(data: dict) -> Report:
    meta = data["meta"]
    return Report(
        meta=RunMeta(system_tag=meta["system_tag"], config_hash=meta["config_hash"],
                     manifest_hash=meta["manifest_hash"], started_at=meta["timestamp"]),
        collar=data["collar"],
        files=tuple(
            FileRow(f["recording_id"], _components(f), f["audio"], f["upload"], f["processing"], f["download"])
            for f in data["files"]
        ),
        global_components=_components(data["global"]),
        categories=tuple(
            CategoryRow(CategoryKey(CategoryKind(c["kind"]), c["value"]), _components(c), c["audio"], c["completion"])
            for c in data["categories"]
        ),
        failed=tuple(FailedRow(f["recording_id"], f["status"], f["message"]) for f in data["failed"]),
    )


def load_report(raw: bytes | str) -> Report:
    return report_from_json(json.loads(raw))


CSV_FIELDS = ["scope", "key", "false_alarm", "missed", "confusion", "denominator", "der",
              "audio", "completion", "speed_factor"]


def plot_points(reports: Sequence[Report]) -> list[dict]:
    """DER-vs-speed scatter points: a star per system, a circle per (system, dataset)."""
    points = []
    for report in reports:
        tag = report.meta.system_tag
        points.append({"label": tag, "marker": "star", "dataset": "ALL",
                       "x": _speed(report.audio, report.completion), "y": _der(report.global_components)})
        for row in report.categories:
            if row.key.kind is CategoryKind.DATASET:
                points.append({"label": tag, "marker": "circle", "dataset": row.key.value,
                               "x": _speed(row.audio, row.completion), "y": _der(row.components)})
    return points


def emit_report(report: Report | Sequence[Report], format: str = "json") -> bytes:
    reports = list(report) if isinstance(report, (list, tuple)) else [report]
    for r in reports:
        r.check()
    if format == "plotdata":
        return (json.dumps(plot_points(reports), sort_keys=True, indent=2) + "\n").encode()
    if len(reports) != 1:
        raise ValueError(f"{format} output takes exactly one report")
    report = reports[0]
    if format == "json":
        return (json.dumps(report_to_json(report), sort_keys=True, indent=2) + "\n").encode()
    if format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for r in report.files:
            writer.writerow({"scope": "file", "key": r.recording_id, **_row_dict(r.components, r.audio, r.completion)})
        for c in report.categories:
            writer.writerow({"scope": "category", "key": str(c.key), **_row_dict(c.components, c.audio, c.completion)})
        writer.writerow({"scope": "global", "key": "ALL",
                         **_row_dict(report.global_components, report.audio, report.completion)})
        return buf.getvalue().encode()
    raise ValueError(f"unknown report format {format!r}")


@dataclass(frozen=True)
class DeltaRow:
    category: str
    der_a: Fraction | None
    der_b: Fraction | None
    speed_a: Fraction | None
    speed_b: Fraction | None
    regression: bool

    @property
    def der_delta(self) -> Fraction | None:
        if self.der_a is None or self.der_b is None:
            return None
        return self.der_b - self.der_a

    @property
    def speed_delta(self) -> Fraction | None:
        if self.speed_a is None or self.speed_b is None:
            return None
        return self.speed_b - self.speed_a

    def as_dict(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        return {"category": self.category, "der_a": f(self.der_a), "der_b": f(self.der_b),
                "der_delta": f(self.der_delta), "speed_factor_a": f(self.speed_a),
                "speed_factor_b": f(self.speed_b), "speed_factor_delta": f(self.speed_delta),
                "regression": self.regression}


def compare_runs(report_a: Report, report_b: Report, threshold: float = 0.0) -> list[DeltaRow]:
    """Per-category DER and speed-factor changes from ``a`` to ``b``.

    A row is a regression when DER grew by more than ``threshold``.
    """
    if report_a.meta.manifest_hash != report_b.meta.manifest_hash:
        raise ManifestMismatch("reports were produced from different manifests")

    def table(report: Report) -> dict[str, tuple]:
        def exact(comps, audio, completion):
            der = comps.der() if comps.denominator > 0 else None
            return der, (Fraction(audio, completion) if completion > 0 else None)

        rows = {"global": exact(report.global_components, report.audio, report.completion)}
        for c in report.categories:
            rows[str(c.key)] = exact(c.components, c.audio, c.completion)
        return rows

    a, b = table(report_a), table(report_b)
    limit = Fraction(threshold).limit_denominator(10**9)
    out = []
    for key in ["global"] + sorted((set(a) | set(b)) - {"global"}):
        der_a, speed_a = a.get(key, (None, None))
        der_b, speed_b = b.get(key, (None, None))
        regression = der_a is not None and der_b is not None and der_b - der_a > limit
        out.append(DeltaRow(key, der_a, der_b, speed_a, speed_b, regression))
    return out
