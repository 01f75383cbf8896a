import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ann
from diarbench.core import Annotation, Segment, Timeline, Uem, crop, discretize, support
from diarbench.errors import RecordingMismatch


def test_segment_rejects_bad_bounds():
    with pytest.raises(ValueError):
        Segment(5, 5)
    with pytest.raises(ValueError):
        Segment(-1, 3)
    with pytest.raises(TypeError):
        Segment(0.5, 2)


def test_segment_overlap_and_intersection():
    a, b = Segment(0, 10), Segment(5, 20)
    assert a.overlap(b) == 5
    assert a.intersection(b) == Segment(5, 10)
    assert Segment(0, 5).intersection(Segment(5, 9)) is None


def test_support_examples():
    assert support([Segment(0, 5), Segment(3, 8)]) == Timeline([Segment(0, 8)])
    assert support([Segment(0, 2), Segment(2, 4), Segment(10, 11)]) == Timeline([Segment(0, 4), Segment(10, 11)])


intervals = st.lists(
    st.tuples(st.integers(0, 200), st.integers(1, 50)).map(lambda t: Segment(t[0], t[0] + t[1])), max_size=12
)


@given(intervals)
def test_support_matches_membership_sweep(segs):
    covered = np.zeros(260, dtype=bool)
    for s in segs:
        covered[s.start:s.end] = True
    merged = support(segs)
    rebuilt = np.zeros_like(covered)
    for s in merged:
        rebuilt[s.start:s.end] = True
    assert (rebuilt == covered).all()
    # disjoint and non-touching
    for a, b in zip(merged, list(merged)[1:]):
        assert a.end < b.start


@given(intervals, intervals)
def test_crop_matches_membership(segs, regions):
    mask = np.zeros(260, dtype=bool)
    for s in regions:
        mask[s.start:s.end] = True
    annotation = Annotation("r", [(s, "x") for s in segs])
    out = annotation.crop_to(Timeline(regions))
    got = np.zeros(260, dtype=bool)
    for seg, _ in out:
        assert mask[seg.start:seg.end].all()
        got[seg.start:seg.end] = True
    want = np.zeros(260, dtype=bool)
    for s in segs:
        want[s.start:s.end] = True
    assert (got == (want & mask)).all()


def test_crop_by_uem_example():
    a = ann("r", (0, 4, "A"), (6, 9, "B"))
    assert crop(a, Uem("r", Timeline([Segment(3, 7)]))) == ann("r", (3, 4, "A"), (6, 7, "B"))


def test_crop_recording_mismatch():
    with pytest.raises(RecordingMismatch):
        crop(ann("r", (0, 4, "A")), Uem("other", Timeline([Segment(0, 1)])))


def test_uem_regions_are_supported():
    assert Uem("r", Timeline([Segment(0, 5), Segment(4, 9)])).regions == Timeline([Segment(0, 9)])


def test_annotation_canonical_order_and_equality():
    a = ann("r", (5, 6, "B"), (0, 3, "A"))
    b = ann("r", (0, 3, "A"), (5, 6, "B"))
    assert a == b and hash(a) == hash(b)
    assert [t.speaker for t in a] == ["A", "B"]
    assert a.labels() == ["A", "B"]


def test_speaker_timeline_is_supported():
    a = ann("r", (0, 5, "A"), (5, 7, "A"), (2, 3, "B"))
    assert a.speaker_timeline("A") == Timeline([Segment(0, 7)])
    assert len(a) == 3  # tracks are still separate


def test_discretize_midpoint_example():
    m = discretize(ann("r", (0, 750, "A")), 500, Segment(0, 1000))
    assert m.scores.tolist() == [[1.0], [0.0]]


@given(intervals, st.sampled_from([7, 10, 100]))
def test_discretize_matches_midpoint_membership(segs, frame):
    annotation = Annotation("r", [(s, "x") for s in segs])
    extent = Segment(0, 260)
    m = discretize(annotation, frame, extent)
    for t in range(m.num_frames):
        mid2 = 2 * t * frame + frame
        inside = any(2 * s.start <= mid2 < 2 * s.end for s in segs)
        assert bool(m.scores[t, 0] if segs else 0) == inside
