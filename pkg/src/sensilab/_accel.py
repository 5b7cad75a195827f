"""Numba switch.

Hot kernels are written once in a numba-compatible subset of Python and
compiled with ``njit`` when numba is importable and ``SENSILAB_DISABLE_NUMBA``
is unset (or ``0``).  Otherwise the kernels module routes calls to numpy
implementations.
"""

from __future__ import annotations

import os

_flag = os.environ.get("SENSILAB_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("numba disabled by SENSILAB_DISABLE_NUMBA")
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAVE_NUMBA = False


def njit(fn):
    """Compile ``fn`` with numba if enabled, else return it unchanged."""
    if HAVE_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
