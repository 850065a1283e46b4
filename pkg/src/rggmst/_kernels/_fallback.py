"""Pure-Python/numpy fallback for the compiled kernels.

Same contracts as ``rggmst._kernels._compiled``: strict-inequality edge
enumeration and union-find based forest scans. Noticeably slower on large
instances (see benchmarks/bench_kernels.py); results are identical.
"""

import numpy as np
from scipy.spatial import cKDTree

_EMPTY_EDGES = (np.empty(0, dtype=np.int32), np.empty(0, dtype=np.int32),
                np.empty(0, dtype=np.float64))


def edges_within(xs, ys, r):
    """All pairs (i < j) with strict d(i, j) < r, plus the distances."""
    n = xs.shape[0]
    if n < 2 or r <= 0.0:
        return _EMPTY_EDGES
    tree = cKDTree(np.column_stack([xs, ys]))
    pairs = tree.query_pairs(r, output_type="ndarray")
    if pairs.size == 0:
        return _EMPTY_EDGES
    ei = np.minimum(pairs[:, 0], pairs[:, 1]).astype(np.int32)
    ej = np.maximum(pairs[:, 0], pairs[:, 1]).astype(np.int32)
    dd = (xs[ei] - xs[ej]) ** 2 + (ys[ei] - ys[ej]) ** 2
    keep = dd < r * r  # query_pairs is inclusive at the boundary
    return ei[keep], ej[keep], np.sqrt(dd[keep])


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def count_components(n, ei, ej):
    """Number of connected components of the graph on n nodes."""
    if n == 0:
        return 0
    parent = np.arange(n, dtype=np.int32)
    rank = np.zeros(n, dtype=np.uint8)
    comps = n
    for u, v in zip(ei.tolist(), ej.tolist()):
        ru = _find(parent, u)
        rv = _find(parent, v)
        if ru != rv:
            if rank[ru] < rank[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            if rank[ru] == rank[rv]:
                rank[ru] += 1
            comps -= 1
            if comps == 1:
                break
    return comps


def kruskal_scan(ei, ej, order, parent, rank, degrees, comps, stop_comps):
    """Greedy forest scan over edges in the given order.

    Mutates the union-find state and the degree counters in place; returns
    (selected edge positions, component count after the scan).
    """
    sel = []
    if comps > stop_comps:
        for e in order.tolist():
            u = int(ei[e])
            v = int(ej[e])
            ru = _find(parent, u)
            rv = _find(parent, v)
            if ru != rv:
                if rank[ru] < rank[rv]:
                    ru, rv = rv, ru
                parent[rv] = ru
                if rank[ru] == rank[rv]:
                    rank[ru] += 1
                sel.append(e)
                degrees[u] += 1
                degrees[v] += 1
                comps -= 1
                if comps == stop_comps:
                    break
    return np.asarray(sel, dtype=np.int64), comps
