"""Kernel selection.

The compiled kernel is used when it imports and the instance fits in 64
bits; otherwise the pure-Python twin runs.  Set ``AFPP_PURE_PYTHON=1`` to
force the fallback.
"""
import os

from . import _kernel_py

try:
    if os.environ.get("AFPP_PURE_PYTHON"):
        raise ImportError("pure Python forced")
    from . import _ckernel
except ImportError:
    _ckernel = None

EXHAUSTED = _kernel_py.EXHAUSTED
STOPPED = _kernel_py.STOPPED
BUDGET = _kernel_py.BUDGET

COMPILED = _ckernel is not None


def backend_name() -> str:
    return "cython" if COMPILED else "python"


def run(n, later, closed, domains, max_nodes, first, callback=None, backend=None):
    if backend is None:
        backend = "cython" if COMPILED and n <= 64 else "python"
    if backend == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not available")
        return _ckernel.run(n, later, closed, domains, max_nodes, first, callback)
    return _kernel_py.run(n, later, closed, domains, max_nodes, first, callback)
