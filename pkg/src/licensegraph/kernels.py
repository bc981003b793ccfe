"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``LICENSEGRAPH_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
if not os.environ.get("LICENSEGRAPH_PURE"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

reverse_reach = _impl.reverse_reach
pagerank = _impl.pagerank

__all__ = ["BACKEND", "reverse_reach", "pagerank"]
