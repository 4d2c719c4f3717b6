"""Backend selection for the hot loops.

The stencil and monitor kernels exist twice: as numba ``@njit`` loops and as
vectorised numpy code.  numba is used when it imports and the environment
variable ``PINCHFLOW_DISABLE_NUMBA`` is unset or "0".  Both backends stay
callable explicitly (``backend="numba"`` / ``"numpy"``) for comparisons.
"""

import os

FLAG = "PINCHFLOW_DISABLE_NUMBA"

try:  # pragma: no cover - depends on the environment
    import numba  # noqa: F401

    NUMBA_IMPORTABLE = True
except ImportError:  # pragma: no cover
    NUMBA_IMPORTABLE = False


def numba_disabled():
    return os.environ.get(FLAG, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = NUMBA_IMPORTABLE and not numba_disabled()


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
