"""Backend selection for the compiled kernels.

Set ``KWIDTH_DISABLE_NUMBA=1`` to force the pure-numpy code paths.
"""
import os

_FALSEY = {"", "0", "false", "no", "off"}

try:  # pragma: no cover - exercised implicitly
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    flag = os.environ.get("KWIDTH_DISABLE_NUMBA", "").strip().lower()
    return HAVE_NUMBA and flag in _FALSEY


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def thread_count(requested: int | None = None) -> int:
    if requested is None:
        env = os.environ.get("KWIDTH_THREADS")
        requested = int(env) if env else 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return max(1, int(requested))
