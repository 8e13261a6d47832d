"""Hot-loop kernel dispatch.

Two interchangeable implementations live side by side: ``_numba`` holds the
jit-compiled kernels used by default, ``_numpy`` holds pure numpy/python
equivalents with identical signatures and semantics.  Selection happens once
at import time:

* ``ORBITADJ_KERNELS=numpy``  -> force the fallback implementation;
* ``ORBITADJ_KERNELS=numba``  -> require numba (import error if missing);
* unset                       -> numba when importable, else fallback with a
  warning.

``implementation()`` reports which one is active; benchmarks and parity tests
import ``_numba`` / ``_numpy`` directly to compare the two.
"""

from __future__ import annotations

import os
import warnings

__all__ = ["impl", "implementation", "maybe_jit", "NUMBA_AVAILABLE"]

_flag = os.environ.get("ORBITADJ_KERNELS", "").strip().lower()

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    NUMBA_AVAILABLE = False

if _flag == "numpy":
    _active = "numpy"
elif _flag == "numba":
    if not NUMBA_AVAILABLE:
        raise ImportError("ORBITADJ_KERNELS=numba but numba is not importable")
    _active = "numba"
elif _flag:
    raise ValueError(f"ORBITADJ_KERNELS must be 'numba' or 'numpy', not {_flag!r}")
elif NUMBA_AVAILABLE:
    _active = "numba"
else:  # pragma: no cover
    warnings.warn("numba unavailable; falling back to pure-numpy kernels (slow)")
    _active = "numpy"

if _active == "numba":
    from . import _numba as impl
else:
    from . import _numpy as impl


def implementation() -> str:
    """Name of the active kernel implementation: 'numba' or 'numpy'."""
    return _active


def maybe_jit(func=None, **kwargs):
    """Apply ``numba.njit`` when the numba implementation is active, else no-op.

    Used by self-contained numeric loops (e.g. the brute-force census) that
    share one source for both modes.
    """
    if func is None:
        return lambda f: maybe_jit(f, **kwargs)
    if _active == "numba":
        import numba

        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return numba.njit(**kwargs)(func)
    return func
