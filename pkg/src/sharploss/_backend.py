"""Select the kernel implementation at import time.

The compiled Cython module is preferred. Set ``SHARPLOSS_PURE_PYTHON=1`` to
force the numpy fallback (useful for benchmarking and cross-checking).
"""
import os

from . import _kernels_py as pure

compiled = None
if not os.environ.get("SHARPLOSS_PURE_PYTHON"):
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

kernels = compiled if compiled is not None else pure
NAME = "cython" if compiled is not None else "numpy"

correlate_reflect = kernels.correlate_reflect
correlate_reflect_adjoint = kernels.correlate_reflect_adjoint
patch_tensors = kernels.patch_tensors
patch_tensors_backward = kernels.patch_tensors_backward


def use(name: str) -> None:
    """Switch the active implementation at runtime ("cython" or "numpy")."""
    global kernels, NAME, correlate_reflect, correlate_reflect_adjoint, patch_tensors, patch_tensors_backward
    if name == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not available")
        kernels = compiled
    elif name == "numpy":
        kernels = pure
    else:
        raise ValueError(f"unknown backend {name!r}")
    NAME = name
    correlate_reflect = kernels.correlate_reflect
    correlate_reflect_adjoint = kernels.correlate_reflect_adjoint
    patch_tensors = kernels.patch_tensors
    patch_tensors_backward = kernels.patch_tensors_backward
