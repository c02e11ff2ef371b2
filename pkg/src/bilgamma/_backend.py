"""Backend selection for the hot numeric kernels.

``BILGAMMA_BACKEND`` controls whether the kernels in ``_kernels`` are
compiled with numba:

* ``auto`` (default) -- use numba when importable, else plain Python/numpy
* ``numba``          -- require numba, raise if unavailable
* ``numpy``          -- force the pure Python/numpy fallback path

Selection happens once at import time.  ``benchmarks/bench_backends.py``
compares the two paths by launching one subprocess per backend.
"""

import os

_choice = os.environ.get("BILGAMMA_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"BILGAMMA_BACKEND={_choice!r} not understood (use auto, numba or numpy)")

HAS_NUMBA = False
if _choice in ("auto", "numba"):
    try:
        import numba  # noqa: F401
        HAS_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise

USE_NUMBA = HAS_NUMBA and _choice != "numpy"

if USE_NUMBA:
    from numba import njit as _njit

    def jit(func):
        return _njit(cache=True)(func)
else:
    def jit(func):
        return func
