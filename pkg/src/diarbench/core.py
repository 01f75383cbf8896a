"""Time arithmetic, segments, timelines and annotations.

Every time quantity is an integer number of milliseconds ("ticks"). Nothing
in the package stores time as a float.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import RecordingMismatch

Tick = int


def _check_tick(value, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer number of milliseconds, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")


@dataclass(frozen=True, order=True, slots=True)
class Segment:
    """Half-open interval ``[start, end)`` in milliseconds."""

    start: Tick
    end: Tick

    def __post_init__(self):
        _check_tick(self.start, "start")
        _check_tick(self.end, "end")
        if self.end <= self.start:
            raise ValueError(f"empty or reversed segment [{self.start}, {self.end})")
        # normalise numpy integers so hashing/equality stay plain-int
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "end", int(self.end))

    @property
    def duration(self) -> Tick:
        return self.end - self.start

    def intersection(self, other: "Segment") -> "Segment | None":
        start = max(self.start, other.start)
        end = min(self.end, other.end)
        return Segment(start, end) if end > start else None

    def overlap(self, other: "Segment") -> Tick:
        return max(0, min(self.end, other.end) - max(self.start, other.start))

    def __repr__(self) -> str:
        return f"[{self.start}, {self.end})"


class Timeline:
    """Sorted, possibly overlapping collection of segments."""

    __slots__ = ("_segments",)

    def __init__(self, segments: Iterable[Segment] = ()):
        self._segments = tuple(sorted(segments))

    @property
    def segments(self) -> tuple[Segment, ...]:
        return self._segments

    def __iter__(self) -> Iterator[Segment]:
        return iter(self._segments)

    def __len__(self) -> int:
        return len(self._segments)

    def __bool__(self) -> bool:
        return bool(self._segments)

    def __eq__(self, other) -> bool:
        return isinstance(other, Timeline) and self._segments == other._segments

    def __hash__(self) -> int:
        return hash(self._segments)

    def __repr__(self) -> str:
        return f"Timeline({list(self._segments)!r})"

    def add(self, segment: Segment) -> "Timeline":
        return Timeline(self._segments + (segment,))

    def duration(self) -> Tick:
        """Sum of member durations (overlaps counted twice)."""
        return sum(s.duration for s in self._segments)

    def support(self) -> "Timeline":
        return support(self)

    def extent(self) -> Segment | None:
        if not self._segments:
            return None
        return Segment(self._segments[0].start, max(s.end for s in self._segments))

    def crop(self, regions: "Timeline") -> "Timeline":
        """Intersect every member with the (supported) regions."""
        regions = support(regions)
        out = []
        for seg in self._segments:
            for region in regions:
                if region.start >= seg.end:
                    break
                piece = seg.intersection(region)
                if piece is not None:
                    out.append(piece)
        return Timeline(out)


def support(timeline: Timeline | Iterable[Segment]) -> Timeline:
    """Merge overlapping or touching segments into disjoint ones."""
    merged: list[list[int]] = []
    for seg in sorted(timeline):
        if merged and seg.start <= merged[-1][1]:
            if seg.end > merged[-1][1]:
                merged[-1][1] = seg.end
        else:
            merged.append([seg.start, seg.end])
    return Timeline(Segment(a, b) for a, b in merged)


class Track(NamedTuple):
    segment: Segment
    speaker: str


class Annotation:
    """Speaker-labelled segments for one recording.

    Tracks are kept in canonical ``(start, end, speaker)`` order so that two
    annotations holding the same tracks compare equal. Tracks of the same
    speaker are never merged implicitly.
    """

    __slots__ = ("recording_id", "_tracks")

    def __init__(self, recording_id: str, tracks: Iterable[tuple[Segment, str]] = ()):
        self.recording_id = recording_id
        items = []
        for segment, speaker in tracks:
            if not isinstance(segment, Segment):
                raise TypeError(f"expected Segment, got {segment!r}")
            items.append(Track(segment, str(speaker)))
        items.sort(key=lambda t: (t.segment.start, t.segment.end, t.speaker))
        self._tracks = tuple(items)

    @property
    def tracks(self) -> tuple[Track, ...]:
        return self._tracks

    def __iter__(self) -> Iterator[Track]:
        return iter(self._tracks)

    def __len__(self) -> int:
        return len(self._tracks)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Annotation)
            and self.recording_id == other.recording_id
            and self._tracks == other._tracks
        )

    def __hash__(self) -> int:
        return hash((self.recording_id, self._tracks))

    def __repr__(self) -> str:
        body = ", ".join(f"{t.speaker}@{t.segment!r}" for t in self._tracks)
        return f"Annotation({self.recording_id!r}, {{{body}}})"

    def speaker_set(self) -> set[str]:
        return {t.speaker for t in self._tracks}

    def labels(self) -> list[str]:
        return sorted(self.speaker_set())

    def speaker_timeline(self, speaker: str) -> Timeline:
        """Supported timeline of one speaker."""
        return support(t.segment for t in self._tracks if t.speaker == speaker)

    def get_timeline(self) -> Timeline:
        return Timeline(t.segment for t in self._tracks)

    def relabel(self, mapping: dict[str, str]) -> "Annotation":
        return Annotation(
            self.recording_id, ((t.segment, mapping.get(t.speaker, t.speaker)) for t in self._tracks)
        )

    def with_id(self, recording_id: str) -> "Annotation":
        return Annotation(recording_id, self._tracks)

    def crop_to(self, regions: Timeline) -> "Annotation":
        regions = support(regions)
        out = []
        for seg, spk in self._tracks:
            for region in regions:
                if region.start >= seg.end:
                    break
                piece = seg.intersection(region)
                if piece is not None:
                    out.append((piece, spk))
        return Annotation(self.recording_id, out)


@dataclass(frozen=True)
class Uem:
    recording_id: str
    regions: Timeline

    def __post_init__(self):
        object.__setattr__(self, "regions", support(self.regions))


def crop(annotation: Annotation, uem: Uem) -> Annotation:
    """Restrict an annotation to the regions of a UEM."""
    if annotation.recording_id != uem.recording_id:
        raise RecordingMismatch(uem.recording_id, annotation.recording_id)
    return annotation.crop_to(uem.regions)


@dataclass(frozen=True, eq=False)
class ActivityMatrix:
    """Frame-level activity, one column per (local or global) speaker.

    ``scores[t, k]`` is the activity of speaker ``k`` during frame
    ``[origin + t*frame_ms, origin + (t+1)*frame_ms)``.
    """

    frame_ms: Tick
    scores: np.ndarray
    origin: Tick = 0
    labels: tuple[str, ...] = field(default=())

    @property
    def num_frames(self) -> int:
        return int(self.scores.shape[0])

    @property
    def num_speakers(self) -> int:
        return int(self.scores.shape[1])

    def frame_segment(self, index: int, limit: Tick | None = None) -> Segment:
        start = self.origin + index * self.frame_ms
        end = start + self.frame_ms
        if limit is not None:
            end = min(end, limit)
        return Segment(start, end)


def discretize(annotation: Annotation, frame_ms: Tick, extent: Segment) -> ActivityMatrix:
    """Binary frame matrix by the midpoint rule, columns in sorted label order."""
    if frame_ms <= 0:
        raise ValueError("frame_ms must be positive")
    labels = annotation.labels()
    num_frames = -(-extent.duration // frame_ms)
    # doubled midpoints keep everything in integers
    mid2 = 2 * extent.start + frame_ms * (2 * np.arange(num_frames, dtype=np.int64) + 1)
    scores = np.zeros((num_frames, len(labels)), dtype=np.float64)
    column = {label: k for k, label in enumerate(labels)}
    for seg, spk in annotation:
        inside = (mid2 >= 2 * seg.start) & (mid2 < 2 * seg.end)
        scores[inside, column[spk]] = 1.0
    return ActivityMatrix(frame_ms=frame_ms, scores=scores, origin=extent.start, labels=tuple(labels))


class AnonymousSegmentation:
    """Speaker segments whose track ids carry no speaker identity."""

    __slots__ = ("recording_id", "_tracks")

    def __init__(self, recording_id: str, tracks: Iterable[tuple[Segment, str]] = ()):
        self.recording_id = recording_id
        self._tracks = tuple(
            sorted(((seg, str(tid)) for seg, tid in tracks), key=lambda t: (t[0].start, t[0].end, t[1]))
        )

    @property
    def tracks(self) -> tuple[tuple[Segment, str], ...]:
        return self._tracks

    def __iter__(self):
        return iter(self._tracks)

    def __len__(self) -> int:
        return len(self._tracks)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AnonymousSegmentation)
            and self.recording_id == other.recording_id
            and self._tracks == other._tracks
        )

    def __repr__(self) -> str:
        return f"AnonymousSegmentation({self.recording_id!r}, {list(self._tracks)!r})"

    def track_ids(self) -> list[str]:
        """Distinct ids in order of first appearance."""
        return list(dict.fromkeys(tid for _, tid in self._tracks))
