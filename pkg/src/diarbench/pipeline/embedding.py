"""Masked statistics pooling and the two speaker-embedding schedules.

``per_window`` runs the trunk once per (window, local speaker) pair, the way
a batched baseline does. ``per_chunk`` runs it once over the whole chunk and
applies the same per-window speaker masks at the pooling layer only. Because
the trunk here is frame-local the two produce identical embeddings; only the
cost ledger differs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..core import ActivityMatrix, Annotation, Segment, Tick, discretize
from ..errors import EmptyMask
from .windows import frame_range


class EmbeddingStrategy(str, Enum):
    PER_WINDOW = "per_window"
    PER_CHUNK = "per_chunk"


@dataclass(frozen=True, eq=False)
class FrameFeatures:
    frame_ms: Tick
    features: np.ndarray

    @property
    def num_frames(self) -> int:
        return int(self.features.shape[0])


@dataclass(frozen=True, eq=False)
class SpeakerEmbedding:
    window_index: int
    speaker_index: int
    vector: np.ndarray | None  # None when the speaker's mask is empty in this window

    @property
    def active(self) -> bool:
        return self.vector is not None


@dataclass
class CostLedger:
    """Trunk frames processed, split by pipeline stage."""

    frame_ms: Tick
    stages: dict[str, int] = field(default_factory=dict)

    def add(self, stage: str, frames: int) -> None:
        if frames < 0:
            raise ValueError("frame count must be non-negative")
        self.stages[stage] = self.stages.get(stage, 0) + int(frames)

    def frames(self, stage: str | None = None) -> int:
        if stage is None:
            return sum(self.stages.values())
        return self.stages.get(stage, 0)

    @property
    def frames_processed(self) -> int:
        return self.frames()

    def audio_seconds(self, stage: str | None = None) -> Fraction:
        return Fraction(self.frames(stage) * self.frame_ms, 1000)

    @property
    def audio_seconds_equivalent(self) -> Fraction:
        return self.audio_seconds()


def synth_features(
    scenario: Annotation,
    total: Tick,
    frame_ms: Tick = 100,
    dim: int = 32,
    seed=0,
    noise: float = 0.05,
) -> FrameFeatures:
    """Frame features: sum of the active speakers' identity vectors plus noise."""
    rng = np.random.default_rng(seed)
    labels = scenario.labels()
    identities = rng.standard_normal((len(labels), dim)) / np.sqrt(dim)
    activity = discretize(scenario, frame_ms, Segment(0, total)).scores
    feats = activity @ identities if labels else np.zeros((activity.shape[0], dim))
    if noise:
        feats = feats + noise * rng.standard_normal(feats.shape)
    return FrameFeatures(frame_ms=frame_ms, features=feats)


def masked_stats_pool(features, mask) -> np.ndarray:
    """Weighted mean and standard deviation of frame features, concatenated."""
    feats = features.features if isinstance(features, FrameFeatures) else np.asarray(features, dtype=np.float64)
    weights = np.asarray(mask, dtype=np.float64)
    if weights.shape[0] != feats.shape[0]:
        raise ValueError("mask length must equal the number of frames")
    total = weights.sum()
    if total <= 0:
        raise EmptyMask("mask has no active frames")
    # axis-0 reductions accumulate row by row, independent of memory layout
    weighted = weights[:, None] * feats
    mean = weighted.sum(axis=0) / total
    second = (weighted * feats).sum(axis=0) / total
    std = np.sqrt(np.maximum(0.0, second - mean * mean))
    return np.concatenate([mean, std])


def _trunk(features: FrameFeatures, first: int, stop: int) -> np.ndarray:
    """One forward pass of the (frame-local) trunk over frames ``[first, stop)``."""
    return np.array(features.features[first:stop], copy=True)


def _pool(trunk_out: np.ndarray, mask: np.ndarray, window_index: int, speaker_index: int) -> SpeakerEmbedding:
    try:
        vector = masked_stats_pool(trunk_out, mask)
    except EmptyMask:
        vector = None
    return SpeakerEmbedding(window_index, speaker_index, vector)


def _check(features: FrameFeatures, masks: ActivityMatrix) -> None:
    if masks.frame_ms != features.frame_ms or masks.origin != 0:
        raise ValueError("masks must share the feature frame grid")
    if masks.num_frames < features.num_frames:
        raise ValueError("masks must span the features")


def embed_per_window(
    features: FrameFeatures, masks: ActivityMatrix, windows: Sequence[Segment], ledger: CostLedger
) -> list[SpeakerEmbedding]:
    _check(features, masks)
    out = []
    for w, window in enumerate(windows):
        first, stop = frame_range(window, features.frame_ms)
        stop = min(stop, features.num_frames)
        for k in range(masks.num_speakers):
            trunk_out = _trunk(features, first, stop)
            ledger.add("embedding", stop - first)
            out.append(_pool(trunk_out, masks.scores[first:stop, k], w, k))
    return out


def embed_per_chunk(
    features: FrameFeatures, masks: ActivityMatrix, windows: Sequence[Segment], ledger: CostLedger
) -> list[SpeakerEmbedding]:
    _check(features, masks)
    trunk_out = _trunk(features, 0, features.num_frames)
    ledger.add("embedding", features.num_frames)
    out = []
    for w, window in enumerate(windows):
        first, stop = frame_range(window, features.frame_ms)
        stop = min(stop, features.num_frames)
        for k in range(masks.num_speakers):
            out.append(_pool(trunk_out[first:stop], masks.scores[first:stop, k], w, k))
    return out


def embed(strategy: EmbeddingStrategy | str, features, masks, windows, ledger) -> list[SpeakerEmbedding]:
    if EmbeddingStrategy(strategy) is EmbeddingStrategy.PER_WINDOW:
        return embed_per_window(features, masks, windows, ledger)
    return embed_per_chunk(features, masks, windows, ledger)
