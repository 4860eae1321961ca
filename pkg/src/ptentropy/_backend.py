"""Selects between numba-compiled and pure-numpy kernels.

Set ``PTENTROPY_NUMBA=0`` before import to force the numpy path. The
numba path is also skipped silently when numba is not importable.
"""
import os

_FLAG = os.environ.get("PTENTROPY_NUMBA", "1").strip().lower()

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("0", "false", "no", "off")


def njit(func):
    """Compile ``func`` in nopython mode when numba is present.

    Without numba the function is returned unchanged so the kernel module
    can still define (and benchmark) the loop versions.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
