"""RTTM / UEM readers and writers, and JSON dataset manifests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path
from typing import Iterable, TextIO

from .core import Annotation, Segment, Tick, Timeline, Uem
from .errors import (
    BadDuration,
    ConfigError,
    DuplicateRecordingId,
    EmptyRegion,
    MalformedLine,
    MissingField,
    NegativeDuration,
    PrecisionLoss,
)

_NA = "<NA>"


def _to_ticks(text: str, line_no: int) -> Tick:
    """Decimal seconds to integer milliseconds, refusing to round."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise MalformedLine(line_no, f"not a number: {text!r}") from None
    if not value.is_finite():
        raise MalformedLine(line_no, f"not a finite number: {text!r}")
    millis = value * 1000
    if millis != millis.to_integral_value():
        raise PrecisionLoss(line_no, f"{text!r} has sub-millisecond precision")
    return int(millis)


def format_seconds(ticks: Tick) -> str:
    return f"{ticks // 1000}.{ticks % 1000:03d}"


def _lines(text: str | TextIO) -> Iterable[str]:
    if isinstance(text, str):
        return text.splitlines()
    return text


class RttmDocument(dict):
    """Mapping ``recording_id -> Annotation``."""

    def __repr__(self) -> str:
        return f"RttmDocument({dict.__repr__(self)})"


def parse_rttm(text: str | TextIO) -> RttmDocument:
    tracks: dict[str, list[tuple[Segment, str]]] = {}
    for line_no, raw in enumerate(_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith(";;"):
            continue
        fields = line.split()
        if len(fields) != 10 or fields[0] != "SPEAKER":
            raise MalformedLine(line_no, "expected 10-field SPEAKER line")
        recording, onset_s, duration_s, speaker = fields[1], fields[3], fields[4], fields[7]
        onset = _to_ticks(onset_s, line_no)
        duration = _to_ticks(duration_s, line_no)
        if duration <= 0:
            raise NegativeDuration(line_no, f"non-positive duration {duration_s}")
        if onset < 0:
            raise MalformedLine(line_no, f"negative onset {onset_s}")
        tracks.setdefault(recording, []).append((Segment(onset, onset + duration), speaker))
    return RttmDocument({rec: Annotation(rec, items) for rec, items in tracks.items()})


def write_rttm(doc: dict[str, Annotation]) -> str:
    lines = []
    for recording_id in sorted(doc):
        for seg, speaker in doc[recording_id]:
            lines.append(
                f"SPEAKER {recording_id} 1 {format_seconds(seg.start)} "
                f"{format_seconds(seg.duration)} {_NA} {_NA} {speaker} {_NA} {_NA}"
            )
    return "".join(line + "\n" for line in lines)


def read_rttm(path: str | Path) -> RttmDocument:
    with open(path, encoding="utf-8") as f:
        return parse_rttm(f)


def parse_uem(text: str | TextIO) -> dict[str, Uem]:
    regions: dict[str, list[Segment]] = {}
    for line_no, raw in enumerate(_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith(";;"):
            continue
        fields = line.split()
        if len(fields) != 4:
            raise MalformedLine(line_no, "expected '<rec> <chan> <start> <end>'")
        start = _to_ticks(fields[2], line_no)
        end = _to_ticks(fields[3], line_no)
        if start < 0:
            raise MalformedLine(line_no, f"negative start {fields[2]}")
        if end <= start:
            raise EmptyRegion(line_no, f"end {fields[3]} <= start {fields[2]}")
        regions.setdefault(fields[0], []).append(Segment(start, end))
    return {rec: Uem(rec, Timeline(segs)) for rec, segs in regions.items()}


def read_uem(path: str | Path) -> dict[str, Uem]:
    with open(path, encoding="utf-8") as f:
        return parse_uem(f)


class Split(str, Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


@dataclass(frozen=True)
class ManifestEntry:
    recording_id: str
    audio_duration: Tick
    language: str
    split: Split
    reference_rttm: Path
    audio_uri: str | None = None
    dataset: str = "default"
    uem: Path | None = None


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...]
    digest: str = field(default="", compare=False)

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.recording_id in seen:
                raise DuplicateRecordingId(f"duplicate recording id {entry.recording_id!r}")
            seen.add(entry.recording_id)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, recording_id: str) -> ManifestEntry | None:
        for entry in self.entries:
            if entry.recording_id == recording_id:
                return entry
        return None

    def split(self, split: Split | str) -> list[ManifestEntry]:
        split = Split(split)
        return [e for e in self.entries if e.split is split]

    def load_references(self, split: Split | str | None = None) -> RttmDocument:
        """Read every reference RTTM the (optionally filtered) entries point to."""
        entries = self.entries if split is None else self.split(split)
        cache: dict[Path, RttmDocument] = {}
        refs = RttmDocument()
        for entry in entries:
            if entry.reference_rttm not in cache:
                cache[entry.reference_rttm] = read_rttm(entry.reference_rttm)
            doc = cache[entry.reference_rttm]
            # a recording with no speech has no SPEAKER lines at all
            refs[entry.recording_id] = doc.get(entry.recording_id, Annotation(entry.recording_id))
        return refs

    def load_uems(self, split: Split | str | None = None) -> dict[str, Uem]:
        entries = self.entries if split is None else self.split(split)
        uems = {}
        for entry in entries:
            if entry.uem is not None:
                found = read_uem(entry.uem).get(entry.recording_id)
                if found is not None:
                    uems[entry.recording_id] = found
        return uems


_REQUIRED = ("recording_id", "audio_duration", "language", "split", "reference_rttm")


def _duration_ticks(value) -> Tick:
    if isinstance(value, bool):
        raise BadDuration(f"bad duration {value!r}")
    try:
        seconds = Decimal(str(value))
    except InvalidOperation:
        raise BadDuration(f"bad duration {value!r}") from None
    if not seconds.is_finite() or seconds <= 0:
        raise BadDuration(f"duration must be positive, got {value!r}")
    millis = seconds * 1000
    if millis != millis.to_integral_value():
        raise BadDuration(f"duration {value!r} has sub-millisecond precision")
    return int(millis)


def _resolve_uri(uri, base_dir: Path) -> str | None:
    """Relative file paths are taken relative to the manifest; URLs pass through."""
    if uri is None:
        return None
    uri = str(uri)
    if "://" in uri or Path(uri).is_absolute():
        return uri
    return str(base_dir / uri)


def manifest_from_json(data, base_dir: Path = Path("."), digest: str = "") -> Manifest:
    if not isinstance(data, list):
        raise ConfigError("manifest must be a JSON array of entries")
    entries = []
    for raw in data:
        if not isinstance(raw, dict):
            raise ConfigError("manifest entries must be objects")
        for name in _REQUIRED:
            if name not in raw:
                raise MissingField(name)
        try:
            split = Split(raw["split"])
        except ValueError:
            raise ConfigError(f"unknown split {raw['split']!r}") from None
        uem = raw.get("uem")
        entries.append(
            ManifestEntry(
                recording_id=str(raw["recording_id"]),
                audio_duration=_duration_ticks(raw["audio_duration"]),
                language=str(raw["language"]),
                split=split,
                reference_rttm=base_dir / raw["reference_rttm"],
                audio_uri=_resolve_uri(raw.get("audio_uri"), base_dir),
                dataset=str(raw.get("dataset", "default")),
                uem=None if uem is None else base_dir / uem,
            )
        )
    return Manifest(tuple(entries), digest=digest)


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    raw = path.read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return manifest_from_json(data, base_dir=path.parent, digest=hashlib.sha256(raw).hexdigest())
