"""Hot-kernel backend selection.

The Maxwellian block evaluation is the innermost kernel of every
right-hand-side call (O(rows * cols * d_v) exponentials per evaluation).
A compiled Cython version is used when available; otherwise a vectorized
numpy implementation is selected.  Set BGK_KERNELS=numpy to force the
fallback (used by the benchmark).
"""

import os

from bgk_lowrank._kernels import _fallback

if os.environ.get("BGK_KERNELS", "").lower() == "numpy":
    maxwellian_fill = _fallback.maxwellian_fill
    KERNEL_BACKEND = "numpy"
else:
    try:
        from bgk_lowrank._kernels import _maxwell

        maxwellian_fill = _maxwell.maxwellian_fill
        KERNEL_BACKEND = "cython"
    except ImportError:
        maxwellian_fill = _fallback.maxwellian_fill
        KERNEL_BACKEND = "numpy"

__all__ = ["KERNEL_BACKEND", "maxwellian_fill"]
