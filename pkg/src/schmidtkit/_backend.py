"""Kernel backend selection.

Hot numeric loops live in :mod:`schmidtkit.kernels` and are JIT-compiled with
numba by default. Set the environment variable ``SCHMIDTKIT_BACKEND`` to

* ``numpy``  -- force the pure-numpy path (no JIT),
* ``numba``  -- require numba (import error if it is missing),
* ``auto``   -- use numba when importable (default).

The choice is fixed at import time.
"""

from __future__ import annotations

import os
import warnings

_choice = os.environ.get("SCHMIDTKIT_BACKEND", "auto").strip().lower()

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        "SCHMIDTKIT_BACKEND must be one of 'auto', 'numba', 'numpy'; "
        f"got {_choice!r}"
    )
if _choice == "numba" and not HAVE_NUMBA:
    raise ImportError("SCHMIDTKIT_BACKEND=numba but numba is not importable")

USE_NUMBA: bool = HAVE_NUMBA if _choice == "auto" else _choice == "numba"
BACKEND: str = "numba" if USE_NUMBA else "numpy"

if _choice == "auto" and not HAVE_NUMBA:  # pragma: no cover
    warnings.warn("numba unavailable; using pure-numpy kernels", stacklevel=1)


def jit_kernel(func):
    """JIT-compile ``func`` under the numba backend; identity otherwise."""
    if USE_NUMBA:
        return _njit(cache=True)(func)
    return func
