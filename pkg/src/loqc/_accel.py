"""Numba toggle.

Set ``LOQC_DISABLE_NUMBA=1`` to force the pure-numpy kernels. ``LOQC_THREADS``
caps the number of threads used by the parallel Monte Carlo kernel.
"""
from __future__ import annotations

import os

_FALSY = ("", "0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the bundled TBB is often too old and only produces a warning
        numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def numba_disabled() -> bool:
    return os.environ.get("LOQC_DISABLE_NUMBA", "").strip().lower() not in _FALSY


USE_NUMBA = HAVE_NUMBA and not numba_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise a no-op decorator.

    The decorated function is compiled lazily on first call, so importing the
    package with numba disabled never triggers compilation.
    """
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


if HAVE_NUMBA:
    prange = numba.prange
else:  # pragma: no cover
    prange = range


def thread_count() -> int:
    """Threads for parallel kernels, honouring ``LOQC_THREADS``."""
    avail = numba.config.NUMBA_NUM_THREADS if HAVE_NUMBA else (os.cpu_count() or 1)
    raw = os.environ.get("LOQC_THREADS", "").strip()
    if not raw:
        return avail
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"LOQC_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"LOQC_THREADS must be a positive integer, got {raw!r}")
    return min(n, avail)
