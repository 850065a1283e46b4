#!/usr/bin/env python3
"""Benchmark: compiled Cython kernels vs the pure-Python/numpy fallback.

Times the two hot paths (edge enumeration, forest scan) and one full trial
pipeline on each lane. Run after `pip install -e . --no-build-isolation`:

    python3 benchmarks/bench_kernels.py [--sizes 2000 10000 50000]
"""

import argparse
import time

import numpy as np

from rggmst._kernels import _fallback
from rggmst.mst import minimum_spanning_forest
from rggmst.rgg import WeightSpec, build_rgg
from rggmst.sampling import DensitySpec, sample_binomial

try:
    from rggmst._kernels import _compiled
except ImportError:
    _compiled = None


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_lane(lane, name, xs, ys, r):
    n = xs.shape[0]
    t_edges, (ei, ej, d) = _time(lambda: lane.edges_within(xs, ys, r))
    order = np.argsort(d, kind="stable")
    t_comps, target = _time(lambda: lane.count_components(n, ei, ej))

    def scan():
        parent = np.arange(n, dtype=np.int32)
        rank = np.zeros(n, dtype=np.uint8)
        deg = np.zeros(n, dtype=np.int32)
        return lane.kruskal_scan(ei, ej, order, parent, rank, deg, n, target)

    t_scan, _ = _time(scan)
    print(f"  {name:9s} edges={t_edges * 1e3:9.2f} ms  "
          f"components={t_comps * 1e3:9.2f} ms  "
          f"kruskal_scan={t_scan * 1e3:9.2f} ms  ({ei.shape[0]} edges)")
    return t_edges + t_comps + t_scan


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[2000, 10000, 50000])
    args = parser.parse_args()

    if _compiled is None:
        print("compiled kernel unavailable; benchmarking the fallback only")

    for n in args.sizes:
        r = n ** (-1.0 / 3.0)
        pts = sample_binomial(n, DensitySpec.uniform(), seed=0)
        print(f"n={n}, r={r:.4f}")
        t_fb = bench_lane(_fallback, "fallback", pts.xs, pts.ys, r)
        if _compiled is not None:
            t_c = bench_lane(_compiled, "compiled", pts.xs, pts.ys, r)
            print(f"  speedup (kernels): {t_fb / t_c:.1f}x")

        g = build_rgg(pts, r, WeightSpec.constant(1.0))
        t_full, m = _time(lambda: minimum_spanning_forest(g), repeats=2)
        print(f"  full forest via selected lane: {t_full * 1e3:.2f} ms "
              f"(weight {m.total_weight:.4f})")


if __name__ == "__main__":
    main()
