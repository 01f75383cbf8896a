import pytest

from diarbench.core import Annotation, Segment


def ann(recording_id, *tracks):
    """``ann("r", (0, 10, "A"), ...)`` shorthand."""
    return Annotation(recording_id, [(Segment(a, b), spk) for a, b, spk in tracks])


@pytest.fixture
def two_speaker_ref():
    return ann("rec1", (0, 10_000, "A"), (5_000, 15_000, "B"))
