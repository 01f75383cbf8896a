"""Dataset statistics: audio length, overlap ratio, speaker congestion, speaker count."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from statistics import median
from typing import Mapping

from .core import Annotation, Tick, support
from .errors import MissingReference
from .ingest import Manifest, Split
from .pipeline.windows import SlidingWindowSpec, enumerate_windows


def overlap_duration(annotation: Annotation) -> Tick:
    """Time during which two or more distinct speakers are active."""
    events: dict[int, int] = {}
    for spk in annotation.speaker_set():
        for seg in annotation.speaker_timeline(spk):
            events[seg.start] = events.get(seg.start, 0) + 1
            events[seg.end] = events.get(seg.end, 0) - 1
    active = 0
    total = 0
    points = sorted(events)
    for here, nxt in zip(points, points[1:]):
        active += events[here]
        if active >= 2:
            total += nxt - here
    return total


def overlap_ratio(annotation: Annotation, audio_duration: Tick) -> Fraction:
    if audio_duration <= 0:
        raise ValueError("audio_duration must be positive")
    return Fraction(overlap_duration(annotation), audio_duration)


def congested_windows(
    annotation: Annotation,
    audio_duration: Tick,
    window: SlidingWindowSpec = SlidingWindowSpec(),
    max_local: int = 3,
) -> tuple[int, int]:
    """``(congested, total)`` window counts."""
    windows = enumerate_windows(audio_duration, window)
    timelines = [annotation.speaker_timeline(spk) for spk in annotation.labels()]
    congested = 0
    for win in windows:
        active = sum(
            1 for timeline in timelines if any(seg.start < win.end and seg.end > win.start for seg in timeline)
        )
        if active > max_local:
            congested += 1
    return congested, len(windows)


def speaker_congestion(
    annotation: Annotation,
    audio_duration: Tick,
    window: SlidingWindowSpec = SlidingWindowSpec(),
    max_local: int = 3,
) -> Fraction:
    congested, total = congested_windows(annotation, audio_duration, window, max_local)
    return Fraction(congested, total)


@dataclass(frozen=True)
class DatasetStats:
    total_audio: Tick
    overlap_ratio: Fraction
    speaker_congestion: Fraction
    median_speaker_count: Fraction
    num_recordings: int

    def as_dict(self) -> dict:
        return {
            "num_recordings": self.num_recordings,
            "total_audio_ms": self.total_audio,
            "total_audio_hours": round(self.total_audio / 3_600_000, 4),
            "overlap_ratio": float(self.overlap_ratio),
            "speaker_congestion": float(self.speaker_congestion),
            "median_speaker_count": float(self.median_speaker_count),
        }


def dataset_stats(
    manifest: Manifest,
    references: Mapping[str, Annotation],
    split: Split | str = Split.TEST,
    window: SlidingWindowSpec = SlidingWindowSpec(),
    max_local: int = 3,
) -> DatasetStats:
    """Duration-weighted overlap, window-weighted congestion, median speaker count."""
    entries = manifest.split(split)
    total_audio = overlapped = congested = windows = 0
    counts = []
    for entry in entries:
        if entry.recording_id not in references:
            raise MissingReference(entry.recording_id)
        annotation = references[entry.recording_id]
        total_audio += entry.audio_duration
        overlapped += overlap_duration(annotation)
        c, w = congested_windows(annotation, entry.audio_duration, window, max_local)
        congested += c
        windows += w
        counts.append(len(annotation.speaker_set()))
    if not entries:
        return DatasetStats(0, Fraction(0), Fraction(0), Fraction(0), 0)
    return DatasetStats(
        total_audio=total_audio,
        overlap_ratio=Fraction(overlapped, total_audio),
        speaker_congestion=Fraction(congested, windows),
        median_speaker_count=Fraction(median(Fraction(c) for c in counts)),
        num_recordings=len(entries),
    )


def speech_duration(annotation: Annotation) -> Tick:
    return support(annotation.get_timeline()).duration()
