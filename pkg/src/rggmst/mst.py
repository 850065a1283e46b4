"""Minimum spanning forests of weighted RGGs.

The production path is sort-based greedy (Kruskal) with union-find, with ties
broken by (weight, min index, max index). Large edge lists are consumed in
ascending weight slices located with np.partition, so only a prefix of the
edges is ever fully sorted; the scan order across slices is still globally
non-decreasing, which is all Kruskal needs.

Totals are summed over the selected weights in ascending order. All minimum
spanning forests of a graph share the same weight multiset, so any two
correct implementations produce bitwise-identical totals; the exhaustive
oracle below relies on this for exact-equality testing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError
from .rgg import Rgg

BRUTE_FORCE_MAX_NODES = 10


@dataclass
class MstResult:
    """Minimum spanning forest: total weight, edges, degrees, components."""

    total_weight: float
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_weight: np.ndarray
    degrees: np.ndarray
    components: int

    def __post_init__(self):
        if self.edge_i.shape[0] != self.n - self.components:
            raise AssertionError("edge count != n - components")

    @property
    def n(self) -> int:
        return self.degrees.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_i.shape[0]

    @property
    def forest_flag(self) -> bool:
        return self.components > 1

    def edge_list(self):
        return list(zip(self.edge_i.tolist(), self.edge_j.tolist(),
                        self.edge_weight.tolist()))

    def to_csv(self, path) -> None:
        order = np.lexsort((self.edge_j, self.edge_i))
        with open(path, "w", newline="") as fh:
            fh.write("i,j,weight\n")
            for k in order:
                fh.write(f"{int(self.edge_i[k])},{int(self.edge_j[k])},"
                         f"{float(self.edge_weight[k])!r}\n")

    def to_json(self, path=None):
        summary = {
            "n": self.n,
            "total_weight": self.total_weight,
            "n_edges": self.n_edges,
            "components": self.components,
            "forest_flag": self.forest_flag,
            "max_degree": int(self.degrees.max()) if self.n else 0,
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(summary, fh, indent=2, sort_keys=True)
        return summary


def canonical_total(weights: np.ndarray) -> float:
    """Sum in ascending order: reproducible across edge-selection orders."""
    return float(np.sort(np.asarray(weights, dtype=np.float64)).sum())


def _empty_result(n: int, components: int) -> MstResult:
    return MstResult(0.0, np.empty(0, np.int32), np.empty(0, np.int32),
                     np.empty(0, np.float64), np.zeros(n, np.int32), components)


def minimum_spanning_forest(g: Rgg) -> MstResult:
    """Per-component minimum spanning trees; total is the sum over components."""
    n = g.n
    if n == 0:
        return _empty_result(0, 0)
    ei, ej = g.edge_i, g.edge_j
    target = _kernels.count_components(n, ei, ej)
    need = n - target
    if need == 0:
        return _empty_result(n, target)

    key = g.sort_key()
    n_edges = key.shape[0]
    parent = np.arange(n, dtype=np.int32)
    rank = np.zeros(n, dtype=np.uint8)
    degrees = np.zeros(n, dtype=np.int32)
    comps = n
    chunks = []

    k_take = min(n_edges, max(8 * need, 1024))
    thr_prev = -math.inf
    while comps > target:
        if k_take >= n_edges:
            sub = (np.arange(n_edges, dtype=np.int64) if thr_prev == -math.inf
                   else np.flatnonzero(key > thr_prev))
        else:
            thr = float(np.partition(key, k_take - 1)[k_take - 1])
            if thr <= thr_prev:  # tie plateau; widen the slice
                k_take = min(n_edges, k_take * 8)
                continue
            if thr_prev == -math.inf:
                sub = np.flatnonzero(key <= thr)
            else:
                sub = np.flatnonzero((key > thr_prev) & (key <= thr))
            thr_prev = thr
        ksub = key[sub]
        perm = np.argsort(ksub, kind="stable")
        if np.any(ksub[perm][1:] == ksub[perm][:-1]):  # exact ties: (w, i, j) order
            perm = np.lexsort((ej[sub], ei[sub], ksub))
        order = sub[perm]
        sel, comps = _kernels.kruskal_scan(ei, ej, order, parent, rank,
                                           degrees, comps, target)
        chunks.append(sel)
        if k_take >= n_edges:
            break
        k_take = min(n_edges, k_take * 8)

    sel = np.concatenate(chunks) if chunks else np.empty(0, np.int64)
    if g.weights.is_constant:
        w_sel = g.weights.weight_from(g.edge_dist[sel],
                                      np.full(sel.shape[0], g.weights.xi_const))
    else:
        w_sel = g.edge_weight[sel]
    return MstResult(canonical_total(w_sel),
                     g.edge_i[sel].astype(np.int32), g.edge_j[sel].astype(np.int32),
                     w_sel, degrees, target)


def mst_degree_stats(m: MstResult):
    """(max degree, degree histogram) of a spanning forest."""
    if m.n == 0:
        return 0, np.zeros(1, dtype=np.int64)
    return int(m.degrees.max()), np.bincount(m.degrees)


def _component_labels(n, ei, ej):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in zip(ei.tolist(), ej.tolist()):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
    return [find(v) for v in range(n)]


def _min_tree_exhaustive(nv, edges):
    """Exhaustive minimum spanning tree of a connected graph on nv vertices.

    edges: list of (w, u, v) with local vertex ids, sorted ascending. Searches
    every spanning tree via include/exclude recursion; branches are cut only
    when they provably cannot improve on the best canonical total (a small
    margin keeps float summation order from hiding an optimum).
    """
    n_edges = len(edges)
    best = [math.inf, None]

    def rec(idx, parent, count, acc, chosen):
        margin = 1e-12 * max(1.0, abs(best[0]))
        if acc > best[0] + margin:
            return
        if count == nv - 1:
            canon = canonical_total([edges[k][0] for k in chosen])
            if canon < best[0]:
                best[0] = canon
                best[1] = list(chosen)
            return
        if n_edges - idx < nv - 1 - count:
            return
        w, u, v = edges[idx]

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ru, rv = find(u), find(v)
        if ru != rv:
            child = list(parent)
            child[rv] = ru
            chosen.append(idx)
            rec(idx + 1, child, count + 1, acc + w, chosen)
            chosen.pop()
        rec(idx + 1, parent, count, acc, chosen)

    rec(0, list(range(nv)), 0, 0.0, [])
    return best[1]


def brute_force_mst(g: Rgg) -> MstResult:
    """Exhaustive minimum over spanning forests; test oracle only (n <= 10)."""
    n = g.n
    if n > BRUTE_FORCE_MAX_NODES:
        raise ParameterError(
            f"brute force limited to n <= {BRUTE_FORCE_MAX_NODES}, got {n}")
    if n == 0:
        return _empty_result(0, 0)

    labels = _component_labels(n, g.edge_i, g.edge_j)
    comps = sorted(set(labels))
    w_all = g.edge_weight
    chosen_i, chosen_j, chosen_w = [], [], []
    degrees = np.zeros(n, dtype=np.int32)
    for root in comps:
        verts = [v for v in range(n) if labels[v] == root]
        if len(verts) == 1:
            continue
        local = {v: k for k, v in enumerate(verts)}
        edges = sorted(
            (float(w_all[e]), local[int(g.edge_i[e])], local[int(g.edge_j[e])])
            for e in range(g.n_edges) if labels[int(g.edge_i[e])] == root)
        picked = _min_tree_exhaustive(len(verts), edges)
        for k in picked:
            w, lu, lv = edges[k]
            u, v = verts[lu], verts[lv]
            chosen_i.append(min(u, v))
            chosen_j.append(max(u, v))
            chosen_w.append(w)
            degrees[u] += 1
            degrees[v] += 1

    w_sel = np.asarray(chosen_w, dtype=np.float64)
    return MstResult(canonical_total(w_sel),
                     np.asarray(chosen_i, dtype=np.int32),
                     np.asarray(chosen_j, dtype=np.int32),
                     w_sel, degrees, len(comps))
