"""Select the compiled kernels when available, else the pure-Python ones.

Set ``CSKGKIT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

IMPLEMENTATION = "python"
_impl = _pykernels

if os.environ.get("CSKGKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        IMPLEMENTATION = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

ConceptKernel = _impl.ConceptKernel
lcs_length = _impl.lcs_length
strip_punct = _impl.strip_punct
suffix_step = _impl.suffix_step

__all__ = ["IMPLEMENTATION", "ConceptKernel", "lcs_length", "strip_punct", "suffix_step"]
