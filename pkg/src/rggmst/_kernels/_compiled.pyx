# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: grid-bucketed edge enumeration and union-find.

Mirrors the contracts of ``rggmst._kernels._fallback``; one of the two is
selected at import time by ``rggmst._kernels``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sqrt

cnp.import_array()


cdef inline cnp.int32_t _find(cnp.int32_t[::1] parent, cnp.int32_t x) nogil:
    cdef cnp.int32_t root = x
    cdef cnp.int32_t nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def edges_within(double[::1] xs, double[::1] ys, double r):
    """All pairs (i < j) with strict d(i, j) < r, plus the distances.

    Points must lie in the unit square. Cell size is 1/ncell >= r so only
    same-cell and adjacent-cell pairs are scanned.
    """
    cdef Py_ssize_t n = xs.shape[0]
    if n < 2 or r <= 0.0:
        return (np.empty(0, dtype=np.int32), np.empty(0, dtype=np.int32),
                np.empty(0, dtype=np.float64))

    cdef long ncell = <long>floor(1.0 / r)
    if ncell < 1:
        ncell = 1
    cdef long ncell2 = ncell * ncell
    cdef double rr = r * r

    # counting sort of point ids by cell
    cdef cnp.ndarray starts_arr = np.zeros(ncell2 + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] starts = starts_arr
    cdef cnp.int32_t[::1] order = np.empty(n, dtype=np.int32)
    cdef cnp.int64_t[::1] cell = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] fill

    cdef Py_ssize_t k
    cdef long cx, cy
    with nogil:
        for k in range(n):
            cx = <long>(xs[k] * ncell)
            if cx >= ncell:
                cx = ncell - 1
            cy = <long>(ys[k] * ncell)
            if cy >= ncell:
                cy = ncell - 1
            cell[k] = cx * ncell + cy
            starts[cell[k] + 1] += 1
    starts_arr[1:] = np.cumsum(starts_arr[1:])
    fill = starts_arr[:ncell2].copy()
    with nogil:
        for k in range(n):
            order[fill[cell[k]]] = <cnp.int32_t>k
            fill[cell[k]] += 1

    # half stencil: within-cell plus (+1,0), (0,+1), (+1,+1), (+1,-1)
    cdef long[4] offx = [1, 0, 1, 1]
    cdef long[4] offy = [0, 1, 1, -1]

    cdef long gx, gy, hx, hy, s
    cdef cnp.int64_t a, b, a0, a1, b0, b1
    cdef cnp.int32_t u, v
    cdef double dx, dy, dd
    cdef cnp.int64_t count = 0

    with nogil:
        for gx in range(ncell):
            for gy in range(ncell):
                a0 = starts[gx * ncell + gy]
                a1 = starts[gx * ncell + gy + 1]
                if a0 == a1:
                    continue
                for a in range(a0, a1):
                    u = order[a]
                    for b in range(a + 1, a1):
                        v = order[b]
                        dx = xs[u] - xs[v]
                        dy = ys[u] - ys[v]
                        if dx * dx + dy * dy < rr:
                            count += 1
                for s in range(4):
                    hx = gx + offx[s]
                    hy = gy + offy[s]
                    if hx < 0 or hx >= ncell or hy < 0 or hy >= ncell:
                        continue
                    b0 = starts[hx * ncell + hy]
                    b1 = starts[hx * ncell + hy + 1]
                    for a in range(a0, a1):
                        u = order[a]
                        for b in range(b0, b1):
                            v = order[b]
                            dx = xs[u] - xs[v]
                            dy = ys[u] - ys[v]
                            if dx * dx + dy * dy < rr:
                                count += 1

    ei_arr = np.empty(count, dtype=np.int32)
    ej_arr = np.empty(count, dtype=np.int32)
    d_arr = np.empty(count, dtype=np.float64)
    cdef cnp.int32_t[::1] ei = ei_arr
    cdef cnp.int32_t[::1] ej = ej_arr
    cdef double[::1] dist = d_arr
    cdef cnp.int64_t pos = 0

    with nogil:
        for gx in range(ncell):
            for gy in range(ncell):
                a0 = starts[gx * ncell + gy]
                a1 = starts[gx * ncell + gy + 1]
                if a0 == a1:
                    continue
                for a in range(a0, a1):
                    u = order[a]
                    for b in range(a + 1, a1):
                        v = order[b]
                        dx = xs[u] - xs[v]
                        dy = ys[u] - ys[v]
                        dd = dx * dx + dy * dy
                        if dd < rr:
                            if u < v:
                                ei[pos] = u
                                ej[pos] = v
                            else:
                                ei[pos] = v
                                ej[pos] = u
                            dist[pos] = sqrt(dd)
                            pos += 1
                for s in range(4):
                    hx = gx + offx[s]
                    hy = gy + offy[s]
                    if hx < 0 or hx >= ncell or hy < 0 or hy >= ncell:
                        continue
                    b0 = starts[hx * ncell + hy]
                    b1 = starts[hx * ncell + hy + 1]
                    for a in range(a0, a1):
                        u = order[a]
                        for b in range(b0, b1):
                            v = order[b]
                            dx = xs[u] - xs[v]
                            dy = ys[u] - ys[v]
                            dd = dx * dx + dy * dy
                            if dd < rr:
                                if u < v:
                                    ei[pos] = u
                                    ej[pos] = v
                                else:
                                    ei[pos] = v
                                    ej[pos] = u
                                dist[pos] = sqrt(dd)
                                pos += 1

    return ei_arr, ej_arr, d_arr


def count_components(Py_ssize_t n, cnp.int32_t[::1] ei, cnp.int32_t[::1] ej):
    """Number of connected components of the graph on n nodes."""
    if n == 0:
        return 0
    cdef cnp.int32_t[::1] parent = np.arange(n, dtype=np.int32)
    cdef cnp.uint8_t[::1] rank = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t m = ei.shape[0]
    cdef Py_ssize_t k
    cdef cnp.int32_t ru, rv, tmp
    cdef long comps = <long>n
    with nogil:
        for k in range(m):
            ru = _find(parent, ei[k])
            rv = _find(parent, ej[k])
            if ru != rv:
                if rank[ru] < rank[rv]:
                    tmp = ru
                    ru = rv
                    rv = tmp
                parent[rv] = ru
                if rank[ru] == rank[rv]:
                    rank[ru] += 1
                comps -= 1
                if comps == 1:
                    break
    return comps


def kruskal_scan(cnp.int32_t[::1] ei, cnp.int32_t[::1] ej,
                 cnp.int64_t[::1] order,
                 cnp.int32_t[::1] parent, cnp.uint8_t[::1] rank,
                 cnp.int32_t[::1] degrees,
                 long comps, long stop_comps):
    """Greedy forest scan over edges in the given order.

    Mutates the union-find state and the degree counters in place; returns
    (selected edge positions, component count after the scan). Edges must be
    presented in globally non-decreasing weight order across successive calls.
    """
    cdef Py_ssize_t m = order.shape[0]
    cdef long cap = comps - stop_comps
    if cap < 0:
        cap = 0
    if cap > m:
        cap = m
    sel_arr = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] sel = sel_arr
    cdef Py_ssize_t k
    cdef cnp.int64_t e
    cdef cnp.int32_t u, v, ru, rv, tmp
    cdef Py_ssize_t nsel = 0
    if m > 0 and comps > stop_comps:
        with nogil:
            for k in range(m):
                e = order[k]
                u = ei[e]
                v = ej[e]
                ru = _find(parent, u)
                rv = _find(parent, v)
                if ru != rv:
                    if rank[ru] < rank[rv]:
                        tmp = ru
                        ru = rv
                        rv = tmp
                    parent[rv] = ru
                    if rank[ru] == rank[rv]:
                        rank[ru] += 1
                    sel[nsel] = e
                    nsel += 1
                    degrees[u] += 1
                    degrees[v] += 1
                    comps -= 1
                    if comps == stop_comps:
                        break
    return sel_arr[:nsel], comps
