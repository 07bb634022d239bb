"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set ``EOFDUAL_PURE_PYTHON=1`` to force the fallback (useful for parity
testing and benchmarking; see benchmarks/bench_backends.py).
"""

from __future__ import annotations

import os

from . import _core_py

if os.environ.get("EOFDUAL_PURE_PYTHON"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _core_py

BACKEND = "compiled" if _impl.COMPILED else "python"

entropy_and_gradient = _impl.entropy_and_gradient


def pure_python():
    """The numpy implementation, regardless of the selected backend."""
    return _core_py.entropy_and_gradient
