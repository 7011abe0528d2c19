"""Backend selection for the compiled kernels.

Set ``PTCAVITY_DISABLE_NUMBA=1`` to force the pure-numpy code paths.
"""
import os

_FLAG = os.environ.get("PTCAVITY_DISABLE_NUMBA", "").strip().lower()

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """Compile ``func`` in nopython mode when numba is present, else return it."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=False, fastmath=False)(func)
