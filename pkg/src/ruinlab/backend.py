"""Kernel backend selection.

The per-path simulation loops exist twice: a compiled Cython extension
(_kernels) and a pure-Python mirror (_kernels_py) with identical
signatures and bit-identical outputs. The compiled one is picked when
present; set RUINLAB_PURE=1 to force the fallback (useful for parity
testing and environments without a compiler).
"""
from __future__ import annotations

import os

if os.environ.get("RUINLAB_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

KERNEL_IMPL = kernels.KERNEL_IMPL
