"""Kernel backend selection.

The compiled extension is used when importable; otherwise the pure-Python
implementation. ``ORDERDAG_KERNEL=python`` forces the fallback.
"""

import os

from . import _pykernel

BACKEND = "python"
_impl = _pykernel

if os.environ.get("ORDERDAG_KERNEL", "").lower() != "python":
    try:
        from . import _ckernel as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernel

sample_parents = _impl.sample_parents
closure = _impl.closure
essential = _impl.essential
undirected_counts = _impl.undirected_counts
sample_undirected_counts = _impl.sample_undirected_counts

__all__ = [
    "BACKEND",
    "sample_parents",
    "closure",
    "essential",
    "undirected_counts",
    "sample_undirected_counts",
]
