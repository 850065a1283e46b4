"""Kernel selection: compiled Cython module if available, numpy fallback otherwise.

Set RGGMST_NO_EXT=1 to force the fallback (used by the benchmark and tests).
"""

import os

if os.environ.get("RGGMST_NO_EXT"):
    from . import _fallback as _impl
    HAVE_COMPILED = False
else:
    try:
        from . import _compiled as _impl  # type: ignore[attr-defined]
        HAVE_COMPILED = True
    except ImportError:
        from . import _fallback as _impl
        HAVE_COMPILED = False

edges_within = _impl.edges_within
count_components = _impl.count_components
kruskal_scan = _impl.kruskal_scan

__all__ = ["edges_within", "count_components", "kruskal_scan", "HAVE_COMPILED"]
