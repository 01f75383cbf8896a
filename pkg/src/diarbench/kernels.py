"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is loaded. Set ``DIARBENCH_PURE_PYTHON=1`` to force the
fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
lsa_lexmin = _kernels_py.lsa_lexmin
hysteresis = _kernels_py.hysteresis

if os.environ.get("DIARBENCH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        lsa_lexmin = _compiled.lsa_lexmin
        hysteresis = _compiled.hysteresis


def backends() -> dict:
    """All importable backends by name, for benchmarks and cross-checks."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
