"""Run records and their append-only JSON-lines persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from ..core import Annotation, Segment, Tick
from ..errors import ConfigError


class RunStatus(str, Enum):
    OK = "ok"
    TIMEOUT = "timeout"
    ERROR = "error"


@dataclass(frozen=True)
class RunRecord:
    recording_id: str
    system_tag: str
    audio_duration: Tick
    upload: Tick = 0
    processing: Tick = 0
    download: Tick = 0
    status: RunStatus = RunStatus.OK
    message: str = ""
    hypothesis: Annotation | None = None
    started_at: str = ""

    def __post_init__(self):
        object.__setattr__(self, "status", RunStatus(self.status))
        if self.status is not RunStatus.OK and self.hypothesis is not None:
            raise ValueError("failed records carry no hypothesis")
        if min(self.upload, self.processing, self.download) < 0:
            raise ValueError("phase durations must be non-negative")

    @property
    def completion(self) -> Tick:
        return self.upload + self.processing + self.download

    @property
    def ok(self) -> bool:
        return self.status is RunStatus.OK

    def to_json(self) -> dict:
        hyp = None
        if self.hypothesis is not None:
            hyp = [[seg.start, seg.end, spk] for seg, spk in self.hypothesis]
        return {
            "type": "record",
            "recording_id": self.recording_id,
            "system_tag": self.system_tag,
            "audio_duration": self.audio_duration,
            "upload": self.upload,
            "processing": self.processing,
            "download": self.download,
            "status": self.status.value,
            "message": self.message,
            "hypothesis": hyp,
            "started_at": self.started_at,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunRecord":
        hyp = data.get("hypothesis")
        hypothesis = None
        if hyp is not None:
            hypothesis = Annotation(data["recording_id"], ((Segment(a, b), spk) for a, b, spk in hyp))
        return cls(
            recording_id=data["recording_id"],
            system_tag=data["system_tag"],
            audio_duration=data["audio_duration"],
            upload=data["upload"],
            processing=data["processing"],
            download=data["download"],
            status=RunStatus(data["status"]),
            message=data.get("message", ""),
            hypothesis=hypothesis,
            started_at=data.get("started_at", ""),
        )


@dataclass(frozen=True)
class RunMeta:
    system_tag: str
    config_hash: str = ""
    manifest_hash: str = ""
    started_at: str = ""
    manifest_path: str = ""
    split: str = "test"
    adapter: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "type": "run",
            "system_tag": self.system_tag,
            "config_hash": self.config_hash,
            "manifest_hash": self.manifest_hash,
            "started_at": self.started_at,
            "manifest_path": self.manifest_path,
            "split": self.split,
            "adapter": self.adapter,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunMeta":
        return cls(
            system_tag=data["system_tag"],
            config_hash=data.get("config_hash", ""),
            manifest_hash=data.get("manifest_hash", ""),
            started_at=data.get("started_at", ""),
            manifest_path=data.get("manifest_path", ""),
            split=data.get("split", "test"),
            adapter=data.get("adapter", {}),
        )


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_run(path: str | Path, meta: RunMeta, records: Iterable[RunRecord]) -> None:
    """Start a run file: one header line, then one line per record."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(_dump(meta.to_json()) + "\n")
        for record in records:
            f.write(_dump(record.to_json()) + "\n")


def append_records(path: str | Path, records: Iterable[RunRecord]) -> None:
    with open(path, "a", encoding="utf-8") as f:
        for record in records:
            f.write(_dump(record.to_json()) + "\n")


def read_run(path: str | Path) -> tuple[RunMeta, list[RunRecord]]:
    meta = None
    records = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError:
                raise ConfigError(f"{path}:{line_no}: invalid JSON") from None
            if data.get("type") == "run":
                meta = RunMeta.from_json(data)
            else:
                records.append(RunRecord.from_json(data))
    if meta is None:
        tag = records[0].system_tag if records else "unknown"
        meta = RunMeta(system_tag=tag, started_at=min((r.started_at for r in records), default=""))
    return meta, records
