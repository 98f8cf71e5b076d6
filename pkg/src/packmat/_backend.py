"""Pick the compiled kernels when available; ``PACKMAT_PURE_PYTHON=1`` forces the fallback."""
from __future__ import annotations

import os

from . import _kernels_py

NAME = "python"
kernels = _kernels_py

if os.environ.get("PACKMAT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        NAME = "cython"


def threads() -> int:
    """Worker cap from ``PACKMAT_THREADS`` (default 1)."""
    try:
        n = int(os.environ.get("PACKMAT_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)
