"""Optional numba acceleration.

Set ``NEUROCASCADE_NO_NUMBA=1`` to run every kernel as plain Python/numpy.
The flag is read once, at import time.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ENABLED = numba is not None and os.environ.get("NEUROCASCADE_NO_NUMBA", "") in ("", "0")


def njit(fn):
    """Compile ``fn`` with numba when enabled, otherwise return it unchanged.

    The uncompiled function stays reachable as ``.py_func`` in both cases so
    benchmarks can time the two paths side by side.
    """
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    fn.py_func = fn
    return fn
