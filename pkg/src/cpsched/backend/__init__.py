"""Kernel backend selection.

The hot kernels exist twice: a numba-compiled module (:mod:`.jit`) and a
pure-Python twin (:mod:`.pure`).  ``CPSCHED_BACKEND`` picks one at import
time:

* ``auto`` (default) — compiled kernels when numba imports, else pure
* ``numba`` — compiled kernels, fail loudly if numba is unavailable
* ``python`` — pure kernels, e.g. for debugging or odd platforms

Both expose the same functions over the same mask/array types and are held
bit-identical by the parity tests, so the choice never changes results.
"""

import os

_choice = os.environ.get("CPSCHED_BACKEND", "auto").strip().lower()

if _choice in ("auto", "numba", "jit"):
    try:
        from . import jit as kernels
    except ImportError:
        if _choice != "auto":
            raise
        from . import pure as kernels
elif _choice in ("python", "pure", "numpy"):
    from . import pure as kernels
else:
    raise RuntimeError(
        f"unrecognized CPSCHED_BACKEND={_choice!r}; use auto, numba, or python")

BACKEND_NAME = kernels.BACKEND_NAME

__all__ = ["kernels", "BACKEND_NAME"]
