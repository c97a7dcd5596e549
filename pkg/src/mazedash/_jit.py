"""numba shim: kernels are compiled with ``njit`` unless numba is missing or
``MAZEDASH_NO_JIT`` is set, in which case they run as plain Python over numpy."""

import importlib.util
import os


def _noop_jit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(f):
        return f

    return wrap


HAVE_NUMBA = importlib.util.find_spec("numba") is not None
JIT_DISABLED = os.environ.get("MAZEDASH_NO_JIT", "").strip().lower() in ("1", "true", "yes")
USE_JIT = HAVE_NUMBA and not JIT_DISABLED

if USE_JIT:
    from numba import njit as _njit

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return _njit(*args, **kwargs)

else:
    njit = _noop_jit


def backend():
    return "numba" if USE_JIT else "python"
