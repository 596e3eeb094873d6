"""Backend selection for the exact elimination kernels.

The compiled extension is used when it imports; set
``MELLINGAMMA_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
from __future__ import annotations

import os

from mellingamma import _pykernels

BACKEND = "python"
rref_int = _pykernels.rref_int
sparse_rank_int = _pykernels.sparse_rank_int

if os.environ.get("MELLINGAMMA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from mellingamma import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        rref_int = _ckernels.rref_int
        sparse_rank_int = _ckernels.sparse_rank_int

__all__ = ["BACKEND", "rref_int", "sparse_rank_int"]
