"""Local segmentation stand-in, window stitching, averaging and binarization."""

from __future__ import annotations

import warnings
from typing import NamedTuple, Sequence

import numpy as np

from .. import kernels
from ..core import ActivityMatrix, AnonymousSegmentation, Annotation, Segment, Tick, discretize
from ..errors import BadThresholds, NoOverlapWarning
from ..matching import solve_assignment

MAX_NOISE = 0.2
QUANTUM = 1_000_000  # scores are compared in integer micro-units


class LocalSegmentation(NamedTuple):
    activity: ActivityMatrix
    dropped: int


def synth_segment(
    scenario: Annotation,
    window: Segment,
    noise_seed,
    frame_ms: Tick = 100,
    max_local: int = 3,
    noise: float = 0.1,
    shuffle: bool = True,
) -> LocalSegmentation:
    """Emulate a local segmentation model on one window.

    Keeps at most ``max_local`` speakers (longest in-window duration first,
    ties by label), adds seeded uniform noise, clamps to [0, 1] and shuffles
    the columns. Speakers beyond capacity are dropped and counted.
    """
    if not 0 <= noise <= MAX_NOISE:
        raise ValueError(f"noise amplitude must be in [0, {MAX_NOISE}]")
    in_window = []
    for spk in scenario.labels():
        dur = sum(seg.overlap(window) for seg in scenario.speaker_timeline(spk))
        if dur > 0:
            in_window.append((-dur, spk))
    in_window.sort()
    kept = [spk for _, spk in in_window[:max_local]]
    dropped = len(in_window) - len(kept)

    local = Annotation(scenario.recording_id, ((seg, spk) for seg, spk in scenario if spk in kept))
    binary = discretize(local.crop_to([window]), frame_ms, window)
    scores = np.zeros((binary.num_frames, max_local))
    labels = list(binary.labels) + [""] * (max_local - len(binary.labels))
    scores[:, : binary.num_speakers] = binary.scores

    rng = np.random.default_rng(noise_seed)
    if noise > 0:
        scores = np.clip(scores + rng.uniform(-noise, noise, size=scores.shape), 0.0, 1.0)
    if shuffle:
        order = rng.permutation(max_local)
        scores = scores[:, order]
        labels = [labels[k] for k in order]
    activity = ActivityMatrix(frame_ms=frame_ms, scores=scores, origin=window.start, labels=tuple(labels))
    return LocalSegmentation(activity, dropped)


def _quantize(scores: np.ndarray) -> np.ndarray:
    return np.rint(scores * QUANTUM).astype(np.int64)


def permutation_cost(reference: np.ndarray, candidate: np.ndarray) -> np.ndarray:
    """Pairwise L1 disagreement between columns, in integer micro-units."""
    ref = _quantize(reference)
    cand = _quantize(candidate)
    return np.abs(ref[:, :, None] - cand[:, None, :]).sum(axis=0)


def _best_permutation(reference: np.ndarray, candidate: np.ndarray) -> np.ndarray:
    k = candidate.shape[1]
    perm = np.arange(k)
    for i, j in solve_assignment(permutation_cost(reference, candidate)).pairs:
        perm[i] = j
    return perm


def align_permutation(
    reference: ActivityMatrix, candidate: ActivityMatrix, overlap_frames: int | None = None
) -> np.ndarray:
    """Column permutation ``perm`` such that ``candidate.scores[:, perm]`` matches ``reference``.

    By default the overlap is derived from both origins. With an explicit
    ``overlap_frames`` the last frames of ``reference`` are compared with the
    first frames of ``candidate``.
    """
    if reference.frame_ms != candidate.frame_ms:
        raise ValueError("frame sizes differ")
    if reference.num_speakers != candidate.num_speakers:
        raise ValueError("speaker column counts differ")
    if overlap_frames is None:
        f = reference.frame_ms
        first = max(reference.origin, candidate.origin)
        last = min(reference.origin + reference.num_frames * f, candidate.origin + candidate.num_frames * f)
        overlap_frames = max(0, (last - first) // f)
        ref = reference.scores[(first - reference.origin) // f :][:overlap_frames]
        cand = candidate.scores[(first - candidate.origin) // f :][:overlap_frames]
    else:
        ref = reference.scores[reference.num_frames - overlap_frames :] if overlap_frames else reference.scores[:0]
        cand = candidate.scores[:overlap_frames]
    if overlap_frames == 0:
        warnings.warn("windows do not overlap; identity permutation used", NoOverlapWarning, stacklevel=2)
        return np.arange(candidate.num_speakers)
    return _best_permutation(ref, cand)


def aggregate(windows: Sequence[tuple[Segment, ActivityMatrix]], total: Tick) -> ActivityMatrix:
    """Stitch windows onto one grid and average overlapping predictions.

    Every window is first aligned (column permutation) to the running
    average on the frames it shares with earlier windows.
    """
    if not windows:
        raise ValueError("no windows to aggregate")
    frame_ms = windows[0][1].frame_ms
    num_speakers = windows[0][1].num_speakers
    num_frames = -(-total // frame_ms)
    # integer micro-unit sums: the average of equal predictions does not depend on how many there were
    sums = np.zeros((num_frames, num_speakers), dtype=np.int64)
    counts = np.zeros(num_frames, dtype=np.int64)
    for _, activity in windows:
        start = activity.origin // frame_ms
        stop = min(start + activity.num_frames, num_frames)
        scores = activity.scores[: stop - start]
        covered = counts[start:stop] > 0
        if covered.any():
            running = sums[start:stop][covered] / counts[start:stop][covered, None] / QUANTUM
            scores = scores[:, _best_permutation(running, scores[covered])]
        sums[start:stop] += _quantize(scores)
        counts[start:stop] += 1
    averaged = sums / np.maximum(counts, 1)[:, None] / QUANTUM
    return ActivityMatrix(frame_ms=frame_ms, scores=averaged, origin=0)


def binarize_frames(
    activity: ActivityMatrix,
    onset: float = 0.5,
    offset: float = 0.5,
    min_duration_on: Tick = 0,
    min_duration_off: Tick = 0,
) -> np.ndarray:
    """Hysteresis-thresholded 0/1 frame matrix with gap filling and short-run removal."""
    if not 0 <= offset <= onset <= 1:
        raise BadThresholds(f"need 0 <= offset <= onset <= 1, got onset={onset}, offset={offset}")
    if min_duration_on < 0 or min_duration_off < 0:
        raise BadThresholds("minimum durations must be non-negative")
    f = activity.frame_ms
    out = np.zeros(activity.scores.shape, dtype=np.uint8)
    for k in range(activity.num_speakers):
        state = kernels.hysteresis(np.ascontiguousarray(activity.scores[:, k]), onset, offset)
        runs = _runs(state)
        if min_duration_off and runs:
            merged = [list(runs[0])]
            for a, b in runs[1:]:
                if (a - merged[-1][1]) * f < min_duration_off:
                    merged[-1][1] = b
                else:
                    merged.append([a, b])
            runs = [tuple(r) for r in merged]
        for a, b in runs:
            if (b - a) * f >= min_duration_on:
                out[a:b, k] = 1
    return out


def _runs(state: np.ndarray) -> list[tuple[int, int]]:
    padded = np.concatenate(([0], state.astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def frames_to_segments(state: np.ndarray, frame_ms: Tick, origin: Tick = 0, limit: Tick | None = None):
    """Contiguous active frames of a 0/1 vector as time segments."""
    out = []
    for a, b in _runs(state):
        start = origin + a * frame_ms
        end = origin + b * frame_ms
        if limit is not None:
            end = min(end, limit)
        if end > start:
            out.append(Segment(start, end))
    return out


def binarize(
    activity: ActivityMatrix,
    onset: float = 0.5,
    offset: float = 0.5,
    min_duration_on: Tick = 0,
    min_duration_off: Tick = 0,
    recording_id: str = "",
    limit: Tick | None = None,
) -> AnonymousSegmentation:
    """Per-column hysteresis into anonymous tracks ``S0``, ``S1``, ..."""
    states = binarize_frames(activity, onset, offset, min_duration_on, min_duration_off)
    tracks = []
    for k in range(activity.num_speakers):
        for seg in frames_to_segments(states[:, k], activity.frame_ms, activity.origin, limit):
            tracks.append((seg, f"S{k}"))
    return AnonymousSegmentation(recording_id, tracks)
