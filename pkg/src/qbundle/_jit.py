"""numba shim.

``QBUNDLE_DISABLE_JIT=1`` (or numba missing) selects the pure-numpy kernels;
``njit`` then returns the function unchanged so shared helpers stay importable.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_ENABLED = numba is not None and os.environ.get("QBUNDLE_DISABLE_JIT", "") in ("", "0")


def njit(*args, **kwargs):
    if JIT_ENABLED:
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def backend() -> str:
    return "numba" if JIT_ENABLED else "numpy"
