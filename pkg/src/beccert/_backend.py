"""Kernel backend selection.

The compiled extension (beccert._kernels) is preferred when present; the
NumPy module is the fallback.  BECCERT_BACKEND=python|cython forces a
choice (forcing "cython" raises if the extension was not built).
"""

import os

from . import _kernels_py

_requested = os.environ.get("BECCERT_BACKEND", "auto").lower()

if _requested == "python":
    kernels = _kernels_py
elif _requested == "cython":
    from . import _kernels as kernels  # noqa: F401  raises if not built
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _kernels_py

BACKEND = kernels.BACKEND_NAME
