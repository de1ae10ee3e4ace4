"""Kernel backend selection.

The compiled extension is used when importable; setting ``KFREE_PURE_PYTHON=1``
forces the numpy fallback.
"""

import os

from . import _fallback

if os.environ.get("KFREE_PURE_PYTHON"):
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _fallback

BACKEND = "compiled" if kernels is not _fallback else "python"
