"""Accelerator selection.

Numba is used when it imports cleanly and ``AEROCAST_NO_NUMBA`` is unset
(or set to ``0``/``false``). Any other value forces the pure-numpy path.
"""

import os

_FLAG = os.environ.get("AEROCAST_NO_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by AEROCAST_NO_NUMBA")
    import numba
except ImportError:
    numba = None

USE_NUMBA = numba is not None


def njit(f=None, **options):
    """``numba.njit`` with ``cache`` off by default; identity without numba."""
    options.setdefault("cache", False)
    if numba is None:
        return f if f is not None else (lambda g: g)
    if f is None:
        return lambda g: numba.njit(g, **options)
    return numba.njit(f, **options)
