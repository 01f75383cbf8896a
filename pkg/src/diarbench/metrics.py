"""Diarization error rate, global aggregation, speed factor and breakdowns."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .core import Annotation, Segment, Tick, Timeline, Uem, support
from .errors import RecordingMismatch, UndefinedDer, UnknownRecording, ZeroCompletionTime
from .matching import solve_assignment


@dataclass(frozen=True)
class DerComponents:
    false_alarm: Tick = 0
    missed: Tick = 0
    confusion: Tick = 0
    denominator: Tick = 0

    def __add__(self, other: "DerComponents") -> "DerComponents":
        return DerComponents(
            self.false_alarm + other.false_alarm,
            self.missed + other.missed,
            self.confusion + other.confusion,
            self.denominator + other.denominator,
        )

    @property
    def errors(self) -> Tick:
        return self.false_alarm + self.missed + self.confusion

    def der(self) -> Fraction:
        if self.denominator <= 0:
            raise UndefinedDer("DER is undefined without reference speech")
        return Fraction(self.errors, self.denominator)

    def as_dict(self) -> dict:
        return {
            "false_alarm": self.false_alarm,
            "missed": self.missed,
            "confusion": self.confusion,
            "denominator": self.denominator,
        }


@dataclass(frozen=True)
class SpeakerMapping:
    map: dict[str, str]
    matched_overlap: Tick


def _timeline_overlap(a: Timeline, b: Timeline) -> Tick:
    """Overlap of two supported timelines (two-pointer merge)."""
    sa, sb = a.segments, b.segments
    i = j = total = 0
    while i < len(sa) and j < len(sb):
        total += sa[i].overlap(sb[j])
        if sa[i].end <= sb[j].end:
            i += 1
        else:
            j += 1
    return total


def _speaker_timelines(annotation: Annotation) -> dict[str, Timeline]:
    grouped: dict[str, list[Segment]] = {}
    for seg, spk in annotation:
        grouped.setdefault(spk, []).append(seg)
    return {spk: support(segs) for spk, segs in sorted(grouped.items())}


def cooccurrence(reference: Annotation, hypothesis: Annotation):
    """Overlap-duration matrix, rows sorted reference labels, columns sorted hypothesis labels."""
    ref = _speaker_timelines(reference)
    hyp = _speaker_timelines(hypothesis)
    matrix = np.zeros((len(ref), len(hyp)), dtype=np.int64)
    for i, rt in enumerate(ref.values()):
        for j, ht in enumerate(hyp.values()):
            matrix[i, j] = _timeline_overlap(rt, ht)
    return list(ref), list(hyp), matrix


def optimal_mapping(reference: Annotation, hypothesis: Annotation) -> SpeakerMapping:
    """Injective hypothesis-to-reference mapping maximizing total overlap."""
    if reference.recording_id != hypothesis.recording_id:
        raise RecordingMismatch(reference.recording_id, hypothesis.recording_id)
    ref_labels, hyp_labels, overlap = cooccurrence(reference, hypothesis)
    if overlap.size == 0:
        return SpeakerMapping({}, 0)
    assignment = solve_assignment(overlap.max() - overlap)
    mapping = {}
    matched = 0
    for r, h in assignment.pairs:
        if overlap[r, h] > 0:
            mapping[hyp_labels[h]] = ref_labels[r]
            matched += int(overlap[r, h])
    return SpeakerMapping(mapping, matched)


def _subtract(regions: Timeline, holes: Timeline) -> Timeline:
    out = []
    holes = list(support(holes))
    for region in support(regions):
        cursor = region.start
        for hole in holes:
            if hole.end <= cursor or hole.start >= region.end:
                continue
            if hole.start > cursor:
                out.append(Segment(cursor, hole.start))
            cursor = max(cursor, hole.end)
        if cursor < region.end:
            out.append(Segment(cursor, region.end))
    return Timeline(out)


def scoring_regions(
    reference: Annotation, hypothesis: Annotation, uem: Uem | None = None, collar: Tick = 0
) -> Timeline | None:
    """Regions that count toward DER, or ``None`` when everything counts.

    The collar removes ``collar // 2`` before and ``collar - collar // 2``
    after every reference boundary.
    """
    if collar < 0:
        raise ValueError("collar must be non-negative")
    if uem is None and collar == 0:
        return None
    if uem is not None:
        regions = uem.regions
    else:
        regions = support(list(reference.get_timeline()) + list(hypothesis.get_timeline()))
    if collar:
        before, after = collar // 2, collar - collar // 2
        zones = []
        for seg, _ in reference:
            for boundary in (seg.start, seg.end):
                zones.append(Segment(max(0, boundary - before), boundary + after))
        regions = _subtract(regions, Timeline(zones))
    return regions


def der_components(
    reference: Annotation,
    hypothesis: Annotation,
    uem: Uem | None = None,
    collar: Tick = 0,
) -> DerComponents:
    if reference.recording_id != hypothesis.recording_id:
        raise RecordingMismatch(reference.recording_id, hypothesis.recording_id)
    if uem is not None and uem.recording_id != reference.recording_id:
        raise RecordingMismatch(reference.recording_id, uem.recording_id)
    regions = scoring_regions(reference, hypothesis, uem, collar)
    if regions is not None:
        reference = reference.crop_to(regions)
        hypothesis = hypothesis.crop_to(regions)
    mapping = optimal_mapping(reference, hypothesis).map

    # sweep over boundary events of per-speaker supported timelines
    events: dict[int, list[tuple[int, bool, str]]] = {}
    for is_ref, annotation in ((True, reference), (False, hypothesis)):
        for spk, timeline in _speaker_timelines(annotation).items():
            for seg in timeline:
                events.setdefault(seg.start, []).append((1, is_ref, spk))
                events.setdefault(seg.end, []).append((-1, is_ref, spk))
    ref_active: set[str] = set()
    hyp_active: set[str] = set()
    fa = miss = conf = denom = 0
    points = sorted(events)
    for here, nxt in zip(points, points[1:] + [None]):
        for delta, is_ref, spk in events[here]:
            target = ref_active if is_ref else hyp_active
            if delta > 0:
                target.add(spk)
            else:
                target.discard(spk)
        if nxt is None:
            break
        length = nxt - here
        r, h = len(ref_active), len(hyp_active)
        if r == 0 and h == 0:
            continue
        correct = sum(1 for spk in hyp_active if mapping.get(spk) in ref_active)
        miss += max(0, r - h) * length
        fa += max(0, h - r) * length
        conf += (min(r, h) - correct) * length
        denom += r * length
    return DerComponents(false_alarm=fa, missed=miss, confusion=conf, denominator=denom)


def aggregate_global(per_file: Iterable[DerComponents]) -> DerComponents:
    """Field-wise sum: one global ratio, not a mean of per-file rates."""
    total = DerComponents()
    for components in per_file:
        total = total + components
    return total


@dataclass(frozen=True)
class SpeedFactor:
    audio: Tick
    completion: Tick

    @property
    def factor(self) -> Fraction:
        return Fraction(self.audio, self.completion)

    def render(self) -> str:
        return f"{float(self.factor):.1f}"

    def __str__(self) -> str:
        return self.render()


def speed_factor(audio: Tick, completion: Tick) -> SpeedFactor:
    """Seconds of audio processed per second of request completion time."""
    if completion <= 0:
        raise ZeroCompletionTime("total request completion time must be positive")
    return SpeedFactor(audio=audio, completion=completion)


class CategoryKind(str, Enum):
    LANGUAGE = "language"
    SPEAKER_COUNT = "speaker_count_bucket"
    DATASET = "dataset"


SPEAKER_BUCKETS = ("1", "2", "3", "4", "5", "6+")


def speaker_count_bucket(count: int) -> str:
    if count >= 6:
        return "6+"
    return str(max(count, 1))


@dataclass(frozen=True, order=True)
class CategoryKey:
    kind: CategoryKind
    value: str

    def __str__(self) -> str:
        return f"{self.kind.value}={self.value}"


def category_of(recording_id: str, kind: CategoryKind | str, manifest, references: Mapping) -> CategoryKey:
    kind = CategoryKind(kind)
    entry = manifest.get(recording_id)
    if entry is None or recording_id not in references:
        raise UnknownRecording(f"recording {recording_id!r} not in manifest/references")
    if kind is CategoryKind.LANGUAGE:
        value = entry.language
    elif kind is CategoryKind.DATASET:
        value = entry.dataset
    else:
        value = speaker_count_bucket(len(references[recording_id].speaker_set()))
    return CategoryKey(kind, value)


def breakdown(
    results: Iterable[tuple[str, DerComponents]],
    manifest,
    references: Mapping[str, Annotation],
    by: CategoryKind | str,
) -> dict[CategoryKey, DerComponents]:
    groups: dict[CategoryKey, list[DerComponents]] = {}
    for recording_id, components in results:
        key = category_of(recording_id, by, manifest, references)
        groups.setdefault(key, []).append(components)
    return {key: aggregate_global(groups[key]) for key in sorted(groups)}
