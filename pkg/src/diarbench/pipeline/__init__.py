"""Desk-scale diarization pipeline simulator."""

from .clustering import cluster, cosine_distances
from .embedding import (
    CostLedger,
    EmbeddingStrategy,
    FrameFeatures,
    SpeakerEmbedding,
    embed_per_chunk,
    embed_per_window,
    masked_stats_pool,
    synth_features,
)
from .segmentation import (
    LocalSegmentation,
    aggregate,
    align_permutation,
    binarize,
    binarize_frames,
    synth_segment,
)
from .simulate import AblationRow, PipelineConfig, PipelineResult, ablate, run_pipeline, synth_scenario
from .windows import SlidingWindowSpec, enumerate_windows, frame_range

__all__ = [
    "AblationRow",
    "CostLedger",
    "EmbeddingStrategy",
    "FrameFeatures",
    "LocalSegmentation",
    "PipelineConfig",
    "PipelineResult",
    "SlidingWindowSpec",
    "SpeakerEmbedding",
    "ablate",
    "aggregate",
    "align_permutation",
    "binarize",
    "binarize_frames",
    "cluster",
    "cosine_distances",
    "embed_per_chunk",
    "embed_per_window",
    "enumerate_windows",
    "frame_range",
    "masked_stats_pool",
    "run_pipeline",
    "synth_features",
    "synth_scenario",
    "synth_segment",
]
