"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``LOOJAM_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("LOOJAM_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

geometric_sums = _impl.geometric_sums
psi_counts = _impl.psi_counts
glrt_scan = _impl.glrt_scan

__all__ = ["BACKEND", "geometric_sums", "psi_counts", "glrt_scan"]
