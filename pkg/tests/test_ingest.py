import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ann
from diarbench.core import Annotation, Segment, Timeline
from diarbench.errors import (
    BadDuration,
    DuplicateRecordingId,
    EmptyRegion,
    MalformedLine,
    MissingField,
    NegativeDuration,
    PrecisionLoss,
)
from diarbench.ingest import load_manifest, parse_rttm, parse_uem, write_rttm
from diarbench.stats import overlap_duration

LINE = "SPEAKER rec1 1 0.500 2.000 <NA> <NA> alice <NA> <NA>\n"


def test_parse_example():
    doc = parse_rttm(LINE)
    assert doc == {"rec1": ann("rec1", (500, 2500, "alice"))}


def test_write_example():
    assert write_rttm({"rec1": ann("rec1", (500, 2500, "alice"))}) == LINE


def test_empty_input_and_output():
    assert parse_rttm("") == {}
    assert write_rttm({}) == ""


def test_comments_and_blank_lines_skipped():
    text = ";; comment\n\n" + LINE + "   \n"
    assert parse_rttm(io.StringIO(text))["rec1"] == ann("rec1", (500, 2500, "alice"))


def test_overlapping_speakers_in_one_recording():
    text = LINE + "SPEAKER rec1 1 1.000 3.000 <NA> <NA> bob <NA> <NA>\n"
    a = parse_rttm(text)["rec1"]
    assert len(a) == 2
    assert overlap_duration(a) == 1500


@pytest.mark.parametrize(
    "line, error",
    [
        ("SPEAKER rec1 1 0.5 2.0 <NA> <NA> alice <NA>", MalformedLine),
        ("LEXEME rec1 1 0.5 2.0 <NA> <NA> alice <NA> <NA>", MalformedLine),
        ("SPEAKER rec1 1 0.5 0.000 <NA> <NA> alice <NA> <NA>", NegativeDuration),
        ("SPEAKER rec1 1 0.5 -1.0 <NA> <NA> alice <NA> <NA>", NegativeDuration),
        ("SPEAKER rec1 1 0.0005 1.0 <NA> <NA> alice <NA> <NA>", PrecisionLoss),
        ("SPEAKER rec1 1 abc 1.0 <NA> <NA> alice <NA> <NA>", MalformedLine),
    ],
)
def test_parse_errors_carry_line_number(line, error):
    with pytest.raises(error) as info:
        parse_rttm(LINE + line + "\n")
    assert info.value.line_no == 2


def test_trailing_zero_digits_are_not_precision_loss():
    assert parse_rttm("SPEAKER r 1 0.5000 1.25000 <NA> <NA> a <NA> <NA>")["r"] == ann("r", (500, 1750, "a"))


labels = st.text(alphabet="abcdefXYZ_0123456789", min_size=1, max_size=6)
tracks = st.lists(
    st.tuples(st.integers(0, 10**7), st.integers(1, 10**6), labels).map(lambda t: (Segment(t[0], t[0] + t[1]), t[2])),
    min_size=1,
    max_size=8,
)
documents = st.dictionaries(labels, tracks, max_size=4).map(
    lambda d: {rec: Annotation(rec, items) for rec, items in d.items()}
)


@settings(max_examples=200)
@given(documents)
def test_round_trip(doc):
    text = write_rttm(doc)
    assert parse_rttm(text) == doc
    assert write_rttm(parse_rttm(text)) == text


def test_every_speaker_line_maps_to_one_track():
    text = "".join(f"SPEAKER r 1 {i}.000 1.000 <NA> <NA> s{i % 3} <NA> <NA>\n" for i in range(7))
    assert len(parse_rttm(text)["r"]) == 7


def test_parse_uem():
    uems = parse_uem("rec1 1 0.000 60.000\nrec2 1 0 5\nrec2 1 10 12\nrec3 1 0 5\nrec3 1 4 8\n")
    assert uems["rec1"].regions == Timeline([Segment(0, 60_000)])
    assert len(uems["rec2"].regions) == 2
    assert uems["rec3"].regions == Timeline([Segment(0, 8_000)])


def test_parse_uem_errors():
    with pytest.raises(EmptyRegion):
        parse_uem("rec1 1 5.0 5.0")
    with pytest.raises(MalformedLine):
        parse_uem("rec1 1 5.0")
    with pytest.raises(PrecisionLoss):
        parse_uem("rec1 1 0.0001 5.0")


def _write_manifest(tmp_path, entries):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(entries))
    return path


def entry(**kw):
    base = {"recording_id": "r1", "audio_duration": "12.5", "language": "en", "split": "test",
            "reference_rttm": "ref.rttm"}
    base.update(kw)
    return base


def test_load_manifest(tmp_path):
    (tmp_path / "ref.rttm").write_text(LINE.replace("rec1", "r1"))
    m = load_manifest(_write_manifest(tmp_path, [entry(audio_uri="a.wav")]))
    assert len(m) == 1
    e = m.get("r1")
    assert e.audio_duration == 12_500
    assert e.reference_rttm == tmp_path / "ref.rttm"
    assert e.audio_uri == str(tmp_path / "a.wav")
    assert len(m.digest) == 64
    assert m.load_references()["r1"] == ann("r1", (500, 2500, "alice"))


def test_manifest_urls_pass_through(tmp_path):
    m = load_manifest(_write_manifest(tmp_path, [entry(audio_uri="https://x/a.wav")]))
    assert m.get("r1").audio_uri == "https://x/a.wav"


def test_recording_without_speech_gets_empty_reference(tmp_path):
    (tmp_path / "ref.rttm").write_text("")
    m = load_manifest(_write_manifest(tmp_path, [entry()]))
    assert m.load_references()["r1"] == Annotation("r1")


@pytest.mark.parametrize(
    "entries, error",
    [
        ([entry(), entry()], DuplicateRecordingId),
        ([entry(audio_duration="-3.0")], BadDuration),
        ([entry(audio_duration="1.0001")], BadDuration),
        ([{k: v for k, v in entry().items() if k != "language"}], MissingField),
    ],
)
def test_manifest_errors(tmp_path, entries, error):
    with pytest.raises(error):
        load_manifest(_write_manifest(tmp_path, entries))
