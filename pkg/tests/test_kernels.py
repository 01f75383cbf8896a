import numpy as np
import pytest

from diarbench import kernels

BACKENDS = sorted(kernels.backends())


def reference_hysteresis(scores, onset, offset):
    out, on = [], False
    for s in scores:
        on = (s >= offset) if on else (s >= onset)
        out.append(int(on))
    return out


@pytest.mark.parametrize("backend", BACKENDS)
def test_hysteresis_trace(backend):
    h = kernels.backends()[backend].hysteresis
    scores = np.array([0.1, 0.6, 0.45, 0.3, 0.55, 0.7, 0.2])
    assert h(scores, 0.5, 0.4).tolist() == [0, 1, 1, 0, 1, 1, 0]
    assert h(np.zeros(0), 0.5, 0.5).tolist() == []


@pytest.mark.parametrize("backend", BACKENDS)
def test_hysteresis_random(backend):
    h = kernels.backends()[backend].hysteresis
    rng = np.random.default_rng(0)
    for _ in range(100):
        scores = rng.random(int(rng.integers(1, 200)))
        onset = float(rng.uniform(0.3, 0.9))
        offset = float(rng.uniform(0.0, onset))
        assert h(scores, onset, offset).tolist() == reference_hysteresis(scores.tolist(), onset, offset)


def test_backend_selection_reported():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in kernels.backends()


def test_pure_python_override(monkeypatch):
    import importlib

    monkeypatch.setenv("DIARBENCH_PURE_PYTHON", "1")
    try:
        reloaded = importlib.reload(kernels)
        assert reloaded.BACKEND == "python"
    finally:
        monkeypatch.delenv("DIARBENCH_PURE_PYTHON")
        importlib.reload(kernels)
