"""Kernel backend selection.

The compiled Cython extension is preferred when present; the pure-NumPy
module is the fallback.  Set SFWMSIM_PURE_PYTHON=1 to force the fallback
(used by the backend-parity test and the benchmark).
"""
import os

if os.environ.get("SFWMSIM_PURE_PYTHON"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"


def active_backend():
    """Name of the kernel backend in use: 'compiled' or 'python'."""
    return BACKEND
