"""Idealized systems for stage-wise evaluation.

The oracle segmenter hands ground-truth segments (identities stripped) to the
embedding stage; the oracle clusterer gives predicted segments their
ground-truth identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .core import AnonymousSegmentation, Annotation, Tick, Uem, support
from .errors import MissingSystemOutput, RecordingMismatch
from .matching import solve_assignment
from .metrics import DerComponents, _timeline_overlap, aggregate_global, der_components

UNKNOWN_PREFIX = "UNK#"


class Granularity(str, Enum):
    PER_TRACK = "per_track"
    PER_SEGMENT = "per_segment"


def oracle_segments(reference: Annotation) -> AnonymousSegmentation:
    """One anonymous track per reference track, identities replaced by opaque ids.

    Tracks of the same speaker share an id; ids ``T0, T1, ...`` are handed out
    by first appearance in canonical track order, so they say nothing about
    the original labels.
    """
    ids: dict[str, str] = {}
    tracks = []
    for seg, spk in reference:
        tracks.append((seg, ids.setdefault(spk, f"T{len(ids)}")))
    return AnonymousSegmentation(reference.recording_id, tracks)


def oracle_labels(
    reference: Annotation,
    predicted: AnonymousSegmentation,
    granularity: Granularity | str = Granularity.PER_TRACK,
) -> list[str]:
    """Ground-truth label for every predicted track, in the segmentation's track order."""
    if reference.recording_id != predicted.recording_id:
        raise RecordingMismatch(reference.recording_id, predicted.recording_id)
    granularity = Granularity(granularity)
    speakers = reference.labels()
    timelines = [reference.speaker_timeline(spk) for spk in speakers]
    unknown = 0

    if granularity is Granularity.PER_SEGMENT:
        out = []
        for seg, _ in predicted:
            overlaps = [sum(seg.overlap(s) for s in tl) for tl in timelines]
            best = max(overlaps, default=0)
            if best > 0:
                # first maximum in sorted label order is the lexicographic tie-break
                out.append(speakers[overlaps.index(best)])
            else:
                out.append(f"{UNKNOWN_PREFIX}{unknown}")
                unknown += 1
        return out

    ids = predicted.track_ids()
    groups = {tid: support(seg for seg, t in predicted if t == tid) for tid in ids}
    cost = np.zeros((len(ids), len(speakers)), dtype=np.int64)
    for i, tid in enumerate(ids):
        duration = groups[tid].duration()
        for j, tl in enumerate(timelines):
            cost[i, j] = duration - _timeline_overlap(groups[tid], tl)
    label_of = {ids[i]: speakers[j] for i, j in solve_assignment(cost).pairs}
    for tid in ids:
        if tid not in label_of:
            label_of[tid] = f"{UNKNOWN_PREFIX}{unknown}"
            unknown += 1
    return [label_of[tid] for _, tid in predicted]


def oracle_cluster(
    reference: Annotation,
    predicted: AnonymousSegmentation,
    granularity: Granularity | str = Granularity.PER_TRACK,
) -> Annotation:
    """Predicted segments relabelled with ground-truth identities.

    ``per_track`` solves one min-cost assignment between track ids and
    reference speakers (cost: track duration minus overlap with the speaker).
    ``per_segment`` gives each segment its maximal-overlap speaker.
    Anything left without a speaker becomes ``UNK#n``.
    """
    labels = oracle_labels(reference, predicted, granularity)
    return Annotation(reference.recording_id, ((seg, lab) for (seg, _), lab in zip(predicted, labels)))


@dataclass(frozen=True)
class StagewiseRow:
    system: str
    dataset: str
    components: DerComponents

    def as_dict(self) -> dict:
        comps = self.components
        return {
            "system": self.system,
            "dataset": self.dataset,
            **comps.as_dict(),
            "der": float(comps.der()) if comps.denominator else None,
        }


def stagewise_report(
    references: Mapping[str, Annotation],
    systems: Mapping[str, Mapping[str, Annotation]],
    datasets: Mapping[str, str] | None = None,
    uems: Mapping[str, Uem] | None = None,
    collar: Tick = 0,
) -> list[StagewiseRow]:
    """Missed / false alarm / confusion per system and dataset, plus an ``ALL`` row.

    ``systems`` maps a system tag (e.g. ``base``, ``oracle_segmenter``) to its
    hypotheses keyed by recording id.
    """
    datasets = datasets or {}
    uems = uems or {}
    rows = []
    for system, outputs in systems.items():
        grouped: dict[str, list[DerComponents]] = {}
        for recording_id in sorted(references):
            if recording_id not in outputs:
                raise MissingSystemOutput(f"{system}: no output for {recording_id!r}")
            comps = der_components(
                references[recording_id], outputs[recording_id], uems.get(recording_id), collar
            )
            grouped.setdefault(datasets.get(recording_id, "default"), []).append(comps)
        for dataset in sorted(grouped):
            rows.append(StagewiseRow(system, dataset, aggregate_global(grouped[dataset])))
        rows.append(StagewiseRow(system, "ALL", aggregate_global(c for g in grouped.values() for c in g)))
    return rows
