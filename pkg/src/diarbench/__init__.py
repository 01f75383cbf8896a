"""Speaker diarization evaluation and benchmarking toolkit."""

from .core import ActivityMatrix, AnonymousSegmentation, Annotation, Segment, Timeline, Uem, crop, discretize, support
from .ingest import Manifest, load_manifest, parse_rttm, parse_uem, write_rttm
from .matching import Assignment, solve_assignment
from .metrics import (
    DerComponents,
    aggregate_global,
    breakdown,
    der_components,
    optimal_mapping,
    speed_factor,
)
from .oracle import oracle_cluster, oracle_segments, stagewise_report
from .stats import dataset_stats, overlap_ratio, speaker_congestion

__version__ = "0.1.0"

__all__ = [
    "ActivityMatrix",
    "AnonymousSegmentation",
    "Annotation",
    "Assignment",
    "DerComponents",
    "Manifest",
    "Segment",
    "Timeline",
    "Uem",
    "aggregate_global",
    "breakdown",
    "crop",
    "dataset_stats",
    "der_components",
    "discretize",
    "load_manifest",
    "optimal_mapping",
    "oracle_cluster",
    "oracle_segments",
    "overlap_ratio",
    "parse_rttm",
    "parse_uem",
    "solve_assignment",
    "speaker_congestion",
    "speed_factor",
    "stagewise_report",
    "support",
    "write_rttm",
]
