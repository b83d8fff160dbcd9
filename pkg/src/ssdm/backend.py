"""Kernel backend selection.

The compiled simplex kernel is preferred; the pure numpy kernel is the
fallback.  Set ``SSDM_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and by CI environments without a compiler).
"""

import os

from . import _simplex_py

if os.environ.get("SSDM_PURE_PYTHON", "").strip() in ("1", "true", "yes"):
    simplex_solve = _simplex_py.simplex_solve
    BACKEND = "python"
else:
    try:
        from . import _simplex  # compiled extension

        simplex_solve = _simplex.simplex_solve
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - no compiler at install time
        simplex_solve = _simplex_py.simplex_solve
        BACKEND = "python"


def backend_name() -> str:
    return BACKEND
