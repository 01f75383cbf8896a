import numpy as np
import pytest

from conftest import ann
from diarbench.core import AnonymousSegmentation, Annotation, Segment
from diarbench.errors import MissingSystemOutput, RecordingMismatch
from diarbench.metrics import DerComponents, der_components
from diarbench.oracle import oracle_cluster, oracle_labels, oracle_segments, stagewise_report
from diarbench.pipeline import run_pipeline, synth_scenario
from oracle_gen import imperfect_segmentation
from oracles import frame_der, random_annotation


def seg(*tracks):
    return AnonymousSegmentation("r", [(Segment(a, b), tid) for a, b, tid in tracks])


def test_oracle_segments_strip_identities():
    ref = ann("r", (0, 5, "zed"), (2, 8, "amy"), (9, 12, "zed"))
    out = oracle_segments(ref)
    assert [s for s, _ in out] == [s for s, _ in ref]
    assert out.track_ids() == ["T0", "T1"]
    assert oracle_segments(Annotation("r")) == AnonymousSegmentation("r")


def test_overlapping_tracks_preserved():
    ref = ann("r", (0, 10, "A"), (5, 15, "B"))
    assert [s for s, _ in oracle_segments(ref)] == [Segment(0, 10), Segment(5, 15)]


def _covered_by_other_speaker(ref):
    """Some track lies entirely inside another speaker's speech (a per_segment tie)."""
    timelines = {spk: ref.speaker_timeline(spk) for spk in ref.labels()}
    for s, spk in ref:
        for other, tl in timelines.items():
            if other != spk and sum(s.overlap(x) for x in tl) == s.duration:
                return True
    return False


def test_per_track_oracle_of_oracle_is_perfect():
    rng = np.random.default_rng(4)
    for _ in range(200):
        ref = random_annotation(rng, recording_id="r")
        assert der_components(ref, oracle_cluster(ref, oracle_segments(ref), "per_track")).errors == 0


def test_per_segment_oracle_of_oracle_is_perfect_without_ties():
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(200):
        ref = random_annotation(rng, recording_id="r")
        if _covered_by_other_speaker(ref):
            continue
        checked += 1
        assert der_components(ref, oracle_cluster(ref, oracle_segments(ref), "per_segment")).errors == 0
    assert checked > 50


def test_per_segment_tie_on_contained_track_loses_speech():
    # B's track is fully inside A's: both overlap it completely, the tie goes to A
    ref = ann("r", (0, 10_000, "A"), (2_000, 4_000, "B"))
    hyp = oracle_cluster(ref, oracle_segments(ref), "per_segment")
    assert der_components(ref, hyp) == DerComponents(0, 2_000, 0, 12_000)


def test_per_segment_majority_label():
    ref = ann("r", (0, 7_000, "A"), (7_000, 10_000, "B"))
    assert oracle_labels(ref, seg((0, 10_000, "x")), "per_segment") == ["A"]


def test_per_segment_tie_is_lexicographic():
    ref = ann("r", (0, 5, "B"), (5, 10, "A"))
    assert oracle_labels(ref, seg((0, 10, "x")), "per_segment") == ["A"]


def test_per_track_crossed_overlaps_match_brute_force():
    ref = ann("r", (0, 6_000, "A"), (6_000, 10_000, "B"))
    predicted = seg((0, 2_000, "p"), (3_000, 9_000, "q"), (9_000, 10_000, "p"))
    labels = dict(zip([t for _, t in predicted], oracle_labels(ref, predicted, "per_track")))
    # p overlaps A 2s + B 1s, q overlaps A 3s + B 3s
    options = {("A", "B"): 2_000 + 3_000, ("B", "A"): 1_000 + 3_000}
    best = max(options, key=options.get)
    assert (labels["p"], labels["q"]) == best


def test_unmatched_tracks_become_unknown():
    ref = ann("r", (0, 10, "A"))
    out = oracle_cluster(ref, seg((0, 5, "x"), (5, 10, "y"), (20, 30, "z")), "per_track")
    labels = sorted(t.speaker for t in out)
    assert labels.count("A") == 1
    assert sum(label.startswith("UNK#") for label in labels) == 2


def test_segment_without_overlap_is_unknown():
    ref = ann("r", (0, 10, "A"))
    assert oracle_labels(ref, seg((20, 30, "x")), "per_segment") == ["UNK#0"]


def test_recording_mismatch():
    with pytest.raises(RecordingMismatch):
        oracle_cluster(ann("a", (0, 1, "A")), seg((0, 1, "x")))


def test_per_segment_homogeneous_segmentations_have_no_confusion():
    rng = np.random.default_rng(7)
    for _ in range(100):
        ref = random_annotation(rng, recording_id="r", max_ms=30_000)
        predicted = imperfect_segmentation(rng, ref, 30_000)
        hyp = oracle_cluster(ref, predicted, "per_segment")
        fa, missed, confusion, denom = frame_der(ref, hyp)
        assert confusion == 0
        assert der_components(ref, hyp) == DerComponents(fa, missed, confusion, denom)


def test_per_segment_straddling_segment_does_cause_confusion():
    # a segment running from A's speech into B's speech keeps label A on B's part
    ref = ann("r", (0, 6_000, "A"), (6_000, 10_000, "B"))
    hyp = oracle_cluster(ref, seg((0, 10_000, "x")), "per_segment")
    assert der_components(ref, hyp) == DerComponents(0, 0, 4_000, 10_000)


def test_pipeline_oracle_clusterer_lower_bounds_base():
    for seed in range(12):
        scenario = synth_scenario(seed, num_speakers=2 + seed % 3, duration=40_000)
        base = der_components(scenario, run_pipeline(scenario, seed=seed).hypothesis)
        oracle = der_components(scenario, run_pipeline(scenario, seed=seed, oracle_clusterer="per_track").hypothesis)
        assert oracle.der() <= base.der()


def test_stagewise_report():
    refs = {"a": ann("a", (0, 10, "A")), "b": ann("b", (0, 10, "A"), (10, 20, "B"))}
    systems = {
        "base": {"a": ann("a", (0, 5, "x")), "b": ann("b", (0, 20, "x"))},
        "oracle_clusterer": {rid: oracle_cluster(r, oracle_segments(r)) for rid, r in refs.items()},
    }
    rows = stagewise_report(refs, systems, {"a": "d1", "b": "d2"})
    table = {(r.system, r.dataset): r.components for r in rows}
    assert table[("base", "d1")] == DerComponents(0, 5, 0, 10)
    assert table[("base", "d2")] == DerComponents(0, 0, 10, 20)
    assert table[("base", "ALL")] == DerComponents(0, 5, 10, 30)
    assert table[("oracle_clusterer", "ALL")] == DerComponents(0, 0, 0, 30)
    with pytest.raises(MissingSystemOutput):
        stagewise_report(refs, {"base": {"a": systems["base"]["a"]}})
