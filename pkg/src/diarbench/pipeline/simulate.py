"""End-to-end simulated diarization pipeline and the stride / embedding ablation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from ..core import ActivityMatrix, AnonymousSegmentation, Annotation, Segment, Tick, Timeline, discretize
from ..errors import ConfigError
from ..metrics import DerComponents, aggregate_global, der_components
from ..oracle import UNKNOWN_PREFIX, Granularity, oracle_labels
from .clustering import cluster
from .embedding import CostLedger, EmbeddingStrategy, embed, synth_features
from .segmentation import aggregate, binarize_frames, frames_to_segments, synth_segment
from .windows import SlidingWindowSpec, enumerate_windows, frame_range


@dataclass(frozen=True)
class PipelineConfig:
    frame_ms: Tick = 100
    max_local: int = 3
    segmentation_noise: float = 0.1
    feature_noise: float = 0.05
    feature_dim: int = 32
    onset: float = 0.5
    offset: float = 0.5
    min_duration_on: Tick = 0
    min_duration_off: Tick = 0
    cluster_threshold: float = 0.5
    shuffle: bool = True


class PipelineResult(NamedTuple):
    hypothesis: Annotation
    ledger: CostLedger
    segmentation: AnonymousSegmentation
    dropped_speakers: int


def synth_scenario(
    seed,
    num_speakers: int = 3,
    duration: Tick = 60_000,
    recording_id: str = "synth",
    min_turn: Tick = 1_000,
    max_turn: Tick = 6_000,
    overlap_prob: float = 0.2,
) -> Annotation:
    """Random turn-taking conversation with occasional overlapped speech and pauses."""
    rng = np.random.default_rng(seed)
    labels = [f"spk{chr(ord('A') + i)}" for i in range(num_speakers)]
    tracks = []
    cursor = 0
    previous = None
    while cursor < duration:
        choices = [s for s in labels if s != previous] or labels
        speaker = choices[int(rng.integers(len(choices)))]
        length = int(rng.integers(min_turn, max_turn + 1))
        end = min(cursor + length, duration)
        if end > cursor:
            tracks.append((Segment(cursor, end), speaker))
        previous = speaker
        if rng.random() < overlap_prob:
            cursor = max(cursor + 1, end - int(rng.integers(200, 1_500)))
        else:
            cursor = end + int(rng.integers(0, 1_500))
    return Annotation(recording_id, tracks)


def _hypothesis_from_votes(
    recording_id: str,
    states: np.ndarray,
    votes_for: Sequence[tuple[int, int, int, str]],
    frame_ms: Tick,
    total: Tick,
) -> Annotation:
    """Label each active (frame, slot) by majority vote.

    ``votes_for`` holds ``(first_frame, stop_frame, slot, label)`` items, one
    per local speaker track; ties go to the label seen first.
    """
    num_frames, num_slots = states.shape
    names = list(dict.fromkeys(label for *_, label in votes_for))
    if not names:
        return Annotation(recording_id)
    column = {name: c for c, name in enumerate(names)}
    votes = np.zeros((num_frames, num_slots, len(names)), dtype=np.int64)
    for first, stop, slot, label in votes_for:
        votes[first:stop, slot, column[label]] += 1
    winner = votes.argmax(axis=2)
    has_vote = votes.max(axis=2) > 0
    active = (states > 0) & has_vote
    tracks = []
    for c, name in enumerate(names):
        speaking = (active & (winner == c)).any(axis=1).astype(np.uint8)
        for seg in frames_to_segments(speaking, frame_ms, 0, total):
            tracks.append((seg, name))
    return Annotation(recording_id, tracks)


def _oracle_votes(
    scenario: Annotation,
    states: np.ndarray,
    windows: Sequence[Segment],
    frame_ms: Tick,
    total: Tick,
    granularity,
) -> list[tuple[int, int, int, str]]:
    """Ground-truth identities for every local track, window by window."""
    items = []
    unknown = 0
    for w, window in enumerate(windows):
        first, stop = frame_range(window, frame_ms)
        local = []
        for k in range(states.shape[1]):
            for seg in frames_to_segments(states[first:stop, k], frame_ms, first * frame_ms, total):
                local.append((seg, f"{k}"))
        if not local:
            continue
        predicted = AnonymousSegmentation(scenario.recording_id, local)
        truth = scenario.crop_to(Timeline([window]))
        for (seg, slot), label in zip(predicted, oracle_labels(truth, predicted, granularity)):
            if label.startswith(UNKNOWN_PREFIX):
                # unknown identities never merge across windows
                label = f"{UNKNOWN_PREFIX}{unknown}"
                unknown += 1
            items.append((seg.start // frame_ms, -(-seg.end // frame_ms), int(slot), label))
    return items


def run_pipeline(
    scenario: Annotation,
    spec: SlidingWindowSpec = SlidingWindowSpec(),
    embedding_strategy: EmbeddingStrategy | str = EmbeddingStrategy.PER_WINDOW,
    seed: int = 0,
    config: PipelineConfig = PipelineConfig(),
    total: Tick | None = None,
    segmentation: AnonymousSegmentation | None = None,
    oracle_clusterer: Granularity | str | None = None,
) -> PipelineResult:
    """Windows -> local segmentation -> stitching -> binarization -> embedding -> clustering.

    Passing ``segmentation`` skips the segmentation stage and embeds the given
    anonymous tracks instead (one mask column per track id); this is how the
    oracle segmenter is built. ``oracle_clusterer`` replaces embedding and
    clustering: each window's local tracks get ground-truth identities from
    ``oracle_labels`` at the given granularity.
    """
    if total is None:
        extent = scenario.get_timeline().extent()
        if extent is None:
            raise ValueError("empty scenario needs an explicit total duration")
        total = extent.end
    f = config.frame_ms
    if spec.duration % f or spec.stride % f:
        raise ConfigError(f"window {spec.duration} and stride {spec.stride} must be multiples of frame {f}")
    windows = enumerate_windows(total, spec)
    num_frames = -(-total // f)
    ledger = CostLedger(frame_ms=f)
    dropped = 0

    if segmentation is None:
        local = []
        for w, window in enumerate(windows):
            out = synth_segment(
                scenario, window, (seed, w), f, config.max_local, config.segmentation_noise, config.shuffle
            )
            first, stop = frame_range(window, f)
            ledger.add("segmentation", stop - first)
            dropped += out.dropped
            local.append((window, out.activity))
        averaged = aggregate(local, total)
        states = binarize_frames(
            averaged, config.onset, config.offset, config.min_duration_on, config.min_duration_off
        )
        tracks = []
        for k in range(states.shape[1]):
            for seg in frames_to_segments(states[:, k], f, 0, total):
                tracks.append((seg, f"S{k}"))
        found = AnonymousSegmentation(scenario.recording_id, tracks)
    else:
        ids = segmentation.track_ids()
        as_annotation = Annotation(
            scenario.recording_id, ((seg, f"{ids.index(tid):06d}") for seg, tid in segmentation)
        )
        grid = discretize(as_annotation, f, Segment(0, num_frames * f))
        states = np.zeros((num_frames, len(ids)), dtype=np.uint8)
        for col, label in enumerate(grid.labels):
            states[:, int(label)] = grid.scores[:, col]
        found = segmentation

    if oracle_clusterer is not None:
        items = _oracle_votes(scenario, states, windows, f, total, Granularity(oracle_clusterer))
    else:
        masks = ActivityMatrix(frame_ms=f, scores=states.astype(np.float64), origin=0)
        features = synth_features(scenario, total, f, config.feature_dim, seed, config.feature_noise)
        embeddings = [e for e in embed(embedding_strategy, features, masks, windows, ledger) if e.active]
        labels = cluster(embeddings, config.cluster_threshold) if embeddings else []
        items = []
        for emb, label in zip(embeddings, labels):
            first, stop = frame_range(windows[emb.window_index], f)
            items.append((first, stop, emb.speaker_index, f"spk{label}"))
    hypothesis = _hypothesis_from_votes(scenario.recording_id, states, items, f, total)
    return PipelineResult(hypothesis, ledger, found, dropped)


@dataclass(frozen=True)
class AblationRow:
    stride: Tick
    strategy: str
    components: DerComponents
    segmentation_frames: int
    embedding_frames: int
    chunk_frames: int
    speedup: Fraction

    @property
    def total_frames(self) -> int:
        return self.segmentation_frames + self.embedding_frames

    @property
    def embedding_redundancy(self) -> Fraction:
        return Fraction(self.embedding_frames, self.chunk_frames)

    def as_dict(self) -> dict:
        comps = self.components
        return {
            "stride_ms": self.stride,
            "strategy": self.strategy,
            **comps.as_dict(),
            "der": float(comps.der()) if comps.denominator else None,
            "segmentation_frames": self.segmentation_frames,
            "embedding_frames": self.embedding_frames,
            "chunk_frames": self.chunk_frames,
            "embedding_redundancy": float(self.embedding_redundancy),
            "speedup": float(self.speedup),
        }


def ablate(
    scenarios: Sequence[Annotation | tuple[Annotation, Tick]],
    strides: Sequence[Tick] = (1_000, 2_000, 4_000),
    strategies: Sequence[EmbeddingStrategy | str] = (EmbeddingStrategy.PER_WINDOW, EmbeddingStrategy.PER_CHUNK),
    seed: int = 0,
    config: PipelineConfig = PipelineConfig(),
    window: Tick = 10_000,
    baseline_stride: Tick = 1_000,
) -> list[AblationRow]:
    """DER and frame-cost speedup per (stride, strategy) over a scenario set.

    Speedup is relative to ``baseline_stride`` with per-window embedding.
    """
    items = [s if isinstance(s, tuple) else (s, None) for s in scenarios]
    if not items:
        raise ValueError("ablation needs at least one scenario")

    def evaluate(stride: Tick, strategy) -> tuple[DerComponents, int, int, int]:
        comps, seg_frames, emb_frames, chunk_frames = [], 0, 0, 0
        for scenario, total in items:
            result = run_pipeline(scenario, SlidingWindowSpec(window, stride), strategy, seed, config, total)
            comps.append(der_components(scenario, result.hypothesis))
            seg_frames += result.ledger.frames("segmentation")
            emb_frames += result.ledger.frames("embedding")
            span = total if total is not None else scenario.get_timeline().extent().end
            chunk_frames += -(-span // config.frame_ms)
        return aggregate_global(comps), seg_frames, emb_frames, chunk_frames

    cache = {}
    keys = [(stride, EmbeddingStrategy(s).value) for stride in strides for s in strategies]
    base_key = (baseline_stride, EmbeddingStrategy.PER_WINDOW.value)
    for key in [base_key] + keys:
        if key not in cache:
            cache[key] = evaluate(*key)
    base_cost = cache[base_key][1] + cache[base_key][2]
    rows = []
    for stride, strategy in keys:
        comps, seg, emb, chunk = cache[(stride, strategy)]
        rows.append(AblationRow(stride, strategy, comps, seg, emb, chunk, Fraction(base_cost, seg + emb)))
    return rows

