"""Elimination kernel selection.

Imports the compiled kernels when the extension was built, otherwise the
pure-Python twins.  Set ``GRAPHCOHOM_PURE=1`` to force the fallback (used by
the backend-equivalence tests and the benchmark).
"""

import os

from . import pure as _pure

if os.environ.get("GRAPHCOHOM_PURE"):
    _backend = _pure
else:
    try:
        from . import _speedups as _backend  # type: ignore[attr-defined]
    except ImportError:
        _backend = _pure

BACKEND = _backend.NAME
rref_frac = _backend.rref_frac
rref_mod = _backend.rref_mod

__all__ = [
    "BACKEND",
    "rref_frac",
    "rref_mod",
    "pure_backend",
    "active_backend",
    "_speedups_available",
]


def pure_backend():
    return _pure


def active_backend():
    return _backend


def _speedups_available():
    """The compiled module if it was built, else None (for the benchmark)."""
    try:
        from . import _speedups  # type: ignore[attr-defined]

        return _speedups
    except ImportError:
        return None
