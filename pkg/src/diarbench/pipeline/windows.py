"""Sliding-window geometry."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import Segment, Tick


@dataclass(frozen=True)
class SlidingWindowSpec:
    duration: Tick = 10_000
    stride: Tick = 1_000

    def __post_init__(self):
        if not 0 < self.stride <= self.duration:
            raise ValueError(f"need 0 < stride <= duration, got {self.stride}/{self.duration}")


def enumerate_windows(total: Tick, spec: SlidingWindowSpec = SlidingWindowSpec()) -> list[Segment]:
    """Windows at multiples of the stride, plus a tail window anchored at ``total``.

    Inputs shorter than one window get a single ``[0, total)`` window.
    """
    if total <= 0:
        raise ValueError("total duration must be positive")
    if total <= spec.duration:
        return [Segment(0, total)]
    windows = [
        Segment(start, start + spec.duration)
        for start in range(0, total - spec.duration + 1, spec.stride)
    ]
    if windows[-1].end < total:
        windows.append(Segment(total - spec.duration, total))
    return windows


def frame_range(window: Segment, frame_ms: Tick) -> tuple[int, int]:
    """Frames ``[first, stop)`` of the global grid touched by ``window``."""
    return window.start // frame_ms, -(-window.end // frame_ms)
