"""Hot inner loops with an optional numba JIT path.

Every kernel in this subpackage is written once, as plain Python over numpy
arrays, in a subset that numba's nopython mode accepts. When numba is
importable and ``LUGMIS_NUMBA`` is not set to a false value, :func:`jit`
returns the compiled dispatcher; otherwise the Python function is used as is.
Both paths consume the same pre-drawn random numbers, so results agree.

    LUGMIS_NUMBA=0 pytest        # force the pure numpy path
"""

import os

ENV_FLAG = "LUGMIS_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def _env_enabled():
    value = os.environ.get(ENV_FLAG, "1").strip().lower()
    return value not in ("0", "false", "no", "off")


USE_NUMBA = HAVE_NUMBA and _env_enabled()


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"


def jit(func):
    """Compile ``func`` in nopython mode when the numba path is active.

    The undecorated function stays reachable as ``py_func`` on the returned
    object in both modes, which is what the equivalence tests call.
    """
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    func.py_func = func
    return func


def compile_kernel(func):
    """Return a numba-compiled copy of ``func`` regardless of the env flag."""
    if not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return numba.njit(cache=False)(getattr(func, "py_func", func))
