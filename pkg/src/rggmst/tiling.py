"""Two-level tiling of the unit square and the constructions built on it.

The coarse level tiles the square into W^2 squares of side t = 1/W with W odd
and t close to r / (2*sqrt(2) + delta), delta in [sqrt(r), 2*sqrt(r)); the
structural inequality the constructions actually consume is 2*sqrt(2)*t < r,
which makes nodes in corner-sharing coarse squares adjacent in the RGG. Each
coarse square is split into L^2 fine squares of side a = t/L with L odd,
realizing a box parameter A_eff = sqrt(n) * t / L.

Fine squares carry a serpentine labelling: consecutive labels share a full
edge, and each coarse square's fine squares are labelled contiguously, so
consecutive occupied squares always lie in the same or in side-sharing coarse
squares. On top of this the module computes occupancy events (a count window
per coarse square), isolated occupied fine squares (all corner-sharing
neighbours empty), gap sums over occupied labels, nine independence families
of interior squares, the constructive spanning tree that upper-bounds the
minimum spanning forest, and the isolated-square lower bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConstructionError, ParameterError
from .mst import MstResult, canonical_total
from .rgg import Rgg, WeightSpec
from .sampling import DensitySpec, PointSet

SQRT8 = 2.0 * math.sqrt(2.0)


@dataclass
class TilingPlan:
    """Realized two-level grid for a given (n, r, A)."""

    n_ref: int
    r_ref: float
    W: int
    L: int
    t: float
    a: float
    A_eff: float
    delta: float            # realized r*W - 2*sqrt(2)
    delta_in_window: bool   # delta in [sqrt(r), 2*sqrt(r))
    a_in_window: bool       # A_eff inside the [A + ..., A + ...) window
    label_of_cell: np.ndarray  # flat cell (row * side + col) -> serpentine label
    cell_of_label: np.ndarray  # inverse permutation

    @property
    def side(self) -> int:
        return self.W * self.L

    @property
    def n_fine(self) -> int:
        return self.side * self.side

    def rows_cols_of_label(self):
        return self.cell_of_label // self.side, self.cell_of_label % self.side

    def to_json(self, path=None):
        data = {
            "n_ref": self.n_ref, "r_ref": self.r_ref, "W": self.W, "L": self.L,
            "t": self.t, "a": self.a, "A_eff": self.A_eff, "delta": self.delta,
            "delta_in_window": self.delta_in_window, "a_in_window": self.a_in_window,
            "n_fine": self.n_fine,
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(data, fh, indent=2, sort_keys=True)
        return data


def _serpentine_labels(W: int, L: int) -> np.ndarray:
    """Serpentine labelling of the (W*L)^2 fine grid.

    Coarse squares are walked boustrophedon by rows; inside each coarse
    square the fine squares are walked in a column snake entered at the
    corner adjacent to the previous square's exit. Consecutive labels share
    a full edge and each coarse block is labelled contiguously.
    """
    side = W * L
    label_of_cell = np.empty(side * side, dtype=np.int64)
    pos = 0
    for big_row in range(W):
        rightward = big_row % 2 == 0
        cols = range(W) if rightward else range(W - 1, -1, -1)
        entry_y = 0
        for big_col in cols:
            entry_x = 0 if rightward else L - 1
            dx = 1 if entry_x == 0 else -1
            ys_fwd = list(range(L)) if entry_y == 0 else list(range(L - 1, -1, -1))
            ys_bwd = ys_fwd[::-1]
            for k in range(L):
                col = big_col * L + entry_x + dx * k
                for y in (ys_fwd if k % 2 == 0 else ys_bwd):
                    label_of_cell[(big_row * L + y) * side + col] = pos
                    pos += 1
            entry_y = L - 1 - entry_y
    return label_of_cell


def _check_serpentine(plan: TilingPlan) -> None:
    rows, cols = plan.rows_cols_of_label()
    step = np.abs(np.diff(rows)) + np.abs(np.diff(cols))
    if plan.n_fine > 1 and not np.all(step == 1):
        raise ConstructionError("serpentine labels not edge-adjacent")


def _odd_near(x: float) -> int:
    lo = 2 * math.floor((x - 1) / 2) + 1
    return max(1, lo if abs(lo - x) <= abs(lo + 2 - x) else lo + 2)


def plan_tiling(n: int, r: float, A: float) -> TilingPlan:
    """Choose W, L (odd) realizing the two-level grid for (n, r, A).

    W makes 1/W as close as possible to r / (2*sqrt(2) + sqrt(r)) subject to
    the structural inequality 2*sqrt(2)/W < r. L is odd with
    A_eff = sqrt(n)/(W*L) * W ... = sqrt(n)*t/L inside the box-parameter
    window [A + 1/ln(n)^(1/4), A + 2/ln(n)^(1/4)) when such an L exists;
    otherwise the odd L minimizing |A_eff - A| is taken and flagged.
    """
    if not 0.0 < r <= 1.0:
        raise ParameterError(f"radius {r} outside (0, 1]")
    if A <= 0:
        raise ParameterError(f"need A > 0, got {A}")
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")

    t_target = r / (SQRT8 + math.sqrt(r))
    W = _odd_near(1.0 / t_target)
    while W * r - SQRT8 <= 0:  # enforce 2*sqrt(2)*t < r
        W += 2
    if W < 3:
        raise ParameterError(f"radius {r} too large for a valid coarse grid")
    t = 1.0 / W
    delta = r * W - SQRT8
    delta_in_window = math.sqrt(r) <= delta < 2.0 * math.sqrt(r)

    logq = math.log(n) ** 0.25
    win_lo = A + 1.0 / logq
    win_hi = A + 2.0 / logq
    s = math.sqrt(n) * t
    # odd L with s/L inside [win_lo, win_hi)
    l_min = math.floor(s / win_hi) + 1
    l_max = math.floor(s / win_lo)
    candidates = [L for L in range(l_min, l_max + 1) if L % 2 == 1 and L >= 1]
    candidates = [L for L in candidates if win_lo <= s / L < win_hi]
    if candidates:
        centre = 0.5 * (win_lo + win_hi)
        L = min(candidates, key=lambda q: (abs(s / q - centre), q))
        a_in_window = True
    else:
        span = range(1, max(5, 2 * int(math.ceil(s / A)) + 2), 2)
        L = min(span, key=lambda q: (abs(s / q - A), q))
        a_in_window = False

    label_of_cell = _serpentine_labels(W, L)
    plan = TilingPlan(
        n_ref=n, r_ref=r, W=W, L=L, t=t, a=t / L, A_eff=s / L,
        delta=delta, delta_in_window=delta_in_window, a_in_window=a_in_window,
        label_of_cell=label_of_cell, cell_of_label=np.argsort(label_of_cell),
    )
    _check_serpentine(plan)
    return plan


def point_labels(points: PointSet, plan: TilingPlan) -> np.ndarray:
    """Serpentine label of the fine square containing each point."""
    side = plan.side
    col = np.minimum((points.xs * side).astype(np.int64), side - 1)
    row = np.minimum((points.ys * side).astype(np.int64), side - 1)
    return plan.label_of_cell[row * side + col]


@dataclass
class OccupancyReport:
    """Per-square counts and all derived events for one configuration."""

    plan: TilingPlan
    coarse_counts: np.ndarray   # per coarse square, flat row-major
    fine_counts: np.ndarray     # per fine square, in serpentine label order
    e_dense: bool               # every coarse count in [eps1*n*t^2/2, 2*eps2*n*t^2]
    e_poi: bool                 # same window (quoted for Poissonized runs)
    e_dense_loo: bool           # window still holds after removing any one point
    isolated: np.ndarray        # label-order mask: occupied, all 8 neighbours empty
    q_occupied: int
    gaps: np.ndarray            # T_1..T_{Q+1}; [(side^2)-1] for the empty config

    def to_json(self, path=None):
        data = {
            "e_dense": bool(self.e_dense), "e_poi": bool(self.e_poi),
            "e_dense_loo": bool(self.e_dense_loo),
            "q_occupied": int(self.q_occupied),
            "isolated_count": int(self.isolated.sum()),
            "coarse_min": int(self.coarse_counts.min()),
            "coarse_max": int(self.coarse_counts.max()),
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(data, fh, indent=2, sort_keys=True)
        return data

    @property
    def isolated_count(self) -> int:
        return int(self.isolated.sum())


def count_window(plan: TilingPlan, density: DensitySpec):
    """[eps1*n*t^2/2, 2*eps2*n*t^2]: the per-coarse-square count window."""
    base = plan.n_ref * plan.t * plan.t
    return 0.5 * density.eps1 * base, 2.0 * density.eps2 * base


def occupancy(points: PointSet, plan: TilingPlan, density: DensitySpec) -> OccupancyReport:
    """Exact per-square counts by coordinate bucketing, plus all event flags."""
    side = plan.side
    W, L = plan.W, plan.L
    col = np.minimum((points.xs * side).astype(np.int64), side - 1)
    row = np.minimum((points.ys * side).astype(np.int64), side - 1)
    fine_flat = np.bincount(row * side + col, minlength=side * side)

    big = np.bincount((row // L) * W + (col // L), minlength=W * W)
    lo, hi = count_window(plan, density)
    e_dense = bool(big.min() >= lo and big.max() <= hi)
    e_dense_loo = bool(big.min() >= lo + 1.0 and big.max() <= hi)

    occ = (fine_flat > 0).reshape(side, side)
    padded = np.zeros((side + 2, side + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = occ
    neigh = (padded[:-2, :-2] + padded[:-2, 1:-1] + padded[:-2, 2:]
             + padded[1:-1, :-2] + padded[1:-1, 2:]
             + padded[2:, :-2] + padded[2:, 1:-1] + padded[2:, 2:])
    isolated_flat = (occ & (neigh == 0)).reshape(-1)

    fine_counts = fine_flat[plan.cell_of_label]
    isolated = isolated_flat[plan.cell_of_label]

    occupied_labels = np.flatnonzero(fine_counts > 0)
    q = occupied_labels.shape[0]
    if q == 0:
        gaps = np.array([side * side - 1], dtype=np.int64)
    else:
        first = occupied_labels[0]            # T_1 = i_1 - 1 with 1-based i
        last = side * side - 1 - occupied_labels[-1]
        gaps = np.concatenate(([first], np.diff(occupied_labels), [last]))

    return OccupancyReport(plan=plan, coarse_counts=big, fine_counts=fine_counts,
                           e_dense=e_dense, e_poi=e_dense, e_dense_loo=e_dense_loo,
                           isolated=isolated, q_occupied=int(q), gaps=gaps)


def gap_sum(report: OccupancyReport, alpha: float) -> float:
    """Y_alpha: sum of alpha-powers of the occupied-label gaps."""
    gaps = report.gaps.astype(np.float64)
    if alpha == 1.0:
        return float(gaps.sum())
    return float(np.sum(gaps ** alpha))


def independence_families(plan: TilingPlan) -> list[np.ndarray]:
    """Nine disjoint families of interior fine squares with disjoint
    3x3 neighbourhoods, by (row mod 3, col mod 3) residue class."""
    rows, cols = plan.rows_cols_of_label()
    side = plan.side
    interior = (rows >= 1) & (rows <= side - 2) & (cols >= 1) & (cols <= side - 2)
    families = []
    for rr in range(3):
        for cc in range(3):
            mask = interior & (rows % 3 == rr) & (cols % 3 == cc)
            families.append(np.flatnonzero(mask))
    return families


@dataclass
class TuniResult:
    """The constructive spanning tree (stars + serpentine bridges)."""

    ok: bool
    reason: str
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_dist: np.ndarray
    edge_weight: np.ndarray
    total_weight: float
    star_weight: float
    bridge_weight: float
    n_bridges: int
    rhs_aggregate: float  # xi_max * (2a)^alpha * (sum of counts + Y_alpha)


def _failed_tuni(reason: str) -> TuniResult:
    empty_i = np.empty(0, np.int32)
    empty_f = np.empty(0, np.float64)
    return TuniResult(False, reason, empty_i, empty_i.copy(), empty_f,
                      empty_f.copy(), math.nan, math.nan, math.nan, 0, math.nan)


def build_tuni(g: Rgg, plan: TilingPlan, report: OccupancyReport,
               require_event: bool = True) -> TuniResult:
    """Spanning tree from per-square stars plus serpentine bridge edges.

    Requires the occupancy event (otherwise the bridge-existence guarantee
    fails and a failure marker is returned; require_event=False skips the
    gate for diagnostics, at the caller's risk). Inside each occupied fine
    square a star rooted at the lowest-index node; between consecutive
    occupied squares the minimum-weight eligible RGG edge.
    """
    if require_event and not report.e_poi:
        return _failed_tuni("occupancy event does not hold")
    n = g.n
    if n == 0:
        return _failed_tuni("empty configuration")

    labels = point_labels(g.points, plan)
    order = np.argsort(labels, kind="stable")  # ascending point index within a label
    sorted_labels = labels[order]
    starts = np.flatnonzero(np.diff(sorted_labels, prepend=-1))
    occupied = sorted_labels[starts]
    counts = np.diff(np.append(starts, n))
    q = occupied.shape[0]

    xs, ys = g.points.xs, g.points.ys
    weights = g.weights
    a = plan.a
    r = g.radius

    # stars: root each occupied square at its lowest point index
    roots = order[starts]
    star_u = np.repeat(roots, counts - 1)
    nonroot = np.ones(n, dtype=bool)
    nonroot[starts] = False
    star_v = order[nonroot]
    sd = np.hypot(xs[star_u] - xs[star_v], ys[star_u] - ys[star_v])
    if sd.size and sd.max() > a * math.sqrt(2.0) * (1 + 1e-9):
        raise ConstructionError("star edge longer than the fine-square diagonal")

    # bridges: per consecutive occupied pair, min-weight edge across all pairs
    if q >= 2:
        pair_counts = counts[:-1] * counts[1:]
        offsets = np.concatenate(([0], np.cumsum(pair_counts)))
        total = int(offsets[-1])
        bid = np.repeat(np.arange(q - 1), pair_counts)
        within = np.arange(total) - offsets[bid]
        next_counts = counts[1:]
        u = order[starts[bid] + within // next_counts[bid]]
        v = order[starts[bid + 1] + within % next_counts[bid]]
        bd = np.hypot(xs[u] - xs[v], ys[u] - ys[v])
        elig = bd < r
        if not np.all(np.bincount(bid[elig], minlength=q - 1) > 0):
            raise ConstructionError("no eligible bridge edge between consecutive "
                                    "occupied squares (occupancy logic violated)")
        u, v, bd, bid = u[elig], v[elig], bd[elig], bid[elig]
        bw = weights.weight_from(bd, weights.xi_values(xs[u], ys[u], xs[v], ys[v]))
        umin, umax = np.minimum(u, v), np.maximum(u, v)
        pick = np.lexsort((umax, umin, bw, bid))
        firsts = pick[np.flatnonzero(np.diff(bid[pick], prepend=-1))]
        bu, bv, bdist, bwght = u[firsts], v[firsts], bd[firsts], bw[firsts]
        gap = (occupied[1:] - occupied[:-1]).astype(np.float64)
        limit = a * np.sqrt((gap + 1.0) ** 2 + 1.0)  # tight form of the 2*T*a bound
        if np.any(bdist > limit * (1 + 1e-9)):
            raise ConstructionError("bridge longer than the serpentine gap allows")
    else:
        bu = bv = np.empty(0, np.int64)
        bdist = bwght = np.empty(0, np.float64)

    sw = weights.weight_from(sd, weights.xi_values(xs[star_u], ys[star_u],
                                                   xs[star_v], ys[star_v]))
    ti = np.concatenate([star_u, bu]).astype(np.int32)
    tj = np.concatenate([star_v, bv]).astype(np.int32)
    tdist = np.concatenate([sd, bdist])
    tw = np.concatenate([sw, bwght])
    if ti.shape[0] != n - 1:
        raise ConstructionError("constructed tree does not have n - 1 edges")
    if _kernels.count_components(n, ti, tj) != 1:
        raise ConstructionError("constructed tree is not spanning")

    y_alpha = gap_sum(report, weights.alpha)
    rhs = weights.xi_max * (2.0 * a) ** weights.alpha * (n + y_alpha)
    return TuniResult(True, "", ti, tj, tdist, tw,
                      total_weight=canonical_total(tw),
                      star_weight=canonical_total(sw),
                      bridge_weight=canonical_total(bwght),
                      n_bridges=int(bu.shape[0]), rhs_aggregate=rhs)


@dataclass
class LowerBoundReport:
    """Isolated-square count and the pathwise lower-bound check."""

    h_alpha: float            # a^alpha * isolated count
    isolated_count: int
    lower_value: float        # 0.5 * xi_min * a^alpha * isolated count
    checked: bool             # pathwise check ran (graph connected)
    pathwise_ok: bool


def lower_bound_count(g: Rgg, m: MstResult, plan: TilingPlan,
                      report: OccupancyReport, weights: WeightSpec) -> LowerBoundReport:
    """Isolated squares force long spanning-forest edges.

    Every isolated occupied square must contribute a forest edge with exactly
    one endpoint inside it and length >= a, and the forest weight dominates
    0.5 * xi_min * a^alpha * (isolated count); checked pathwise when the
    graph is connected.
    """
    a = plan.a
    iso_count = report.isolated_count
    h_alpha = a ** weights.alpha * iso_count
    lower = 0.5 * weights.xi_min * h_alpha
    if m.components != 1:
        return LowerBoundReport(h_alpha, iso_count, lower, False, False)

    ok = m.total_weight >= lower * (1 - 1e-12)
    if iso_count:
        labels = point_labels(g.points, plan)
        lab_i = labels[m.edge_i]
        lab_j = labels[m.edge_j]
        d = np.hypot(g.points.xs[m.edge_i] - g.points.xs[m.edge_j],
                     g.points.ys[m.edge_i] - g.points.ys[m.edge_j])
        for lab in np.flatnonzero(report.isolated):
            crossing = (lab_i == lab) != (lab_j == lab)
            if not np.any(crossing & (d >= a * (1 - 1e-12))):
                ok = False
                break
    return LowerBoundReport(h_alpha, iso_count, lower, True, bool(ok))
