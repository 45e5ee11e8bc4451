"""Select between numba-compiled kernels and the plain numpy/Python path.

Set ``YBSET_PURE_PYTHON=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``) to run
every kernel uninterpreted.  The flag is read once at import time.
"""

import os

_FLAG_VARS = ("YBSET_PURE_PYTHON", "NUMBA_DISABLE_JIT")


def _flag_set(name: str) -> bool:
    return os.environ.get(name, "").strip() not in ("", "0", "false", "False")


PURE_PYTHON = any(_flag_set(v) for v in _FLAG_VARS)

if not PURE_PYTHON:
    try:
        import numba as _nb
    except ImportError:  # pragma: no cover - numba is a hard dependency
        PURE_PYTHON = True

if PURE_PYTHON:

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn

else:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        if len(args) == 1 and callable(args[0]):
            return _nb.njit(**kwargs)(args[0])
        return _nb.njit(*args, **kwargs)


def backend() -> str:
    return "python" if PURE_PYTHON else "numba"
