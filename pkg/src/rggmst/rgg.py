"""Random geometric graph construction with location-dependent edge weights.

Two nodes are adjacent iff their distance is strictly below the adjacency
radius (decided on squared distances, so the cutoff is exact). Edge weights
are d^alpha * xi(x, y) with xi a bounded symmetric factor of the endpoint
locations, tabulated on a grid of cells (constant xi is the default).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np

from . import _kernels
from .errors import ConfigurationError, ParameterError
from .sampling import PointSet

THEOREM_M_FACTOR = 1600.0  # the adjacency-regime constant requires M > 1600/eps1


@dataclass(frozen=True)
class WeightSpec:
    """Edge-weight model w = d^alpha * xi(x, y).

    xi is either a constant or a symmetric table indexed by the grid cells
    of the two endpoints (m x m cells per side, table shape (m^2, m^2)).
    """

    alpha: float
    xi_const: float = 1.0
    table: np.ndarray | None = None
    m: int = 1

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigurationError(f"need alpha > 0, got {self.alpha}")
        if self.table is not None:
            table = np.ascontiguousarray(np.asarray(self.table, dtype=np.float64))
            if table.shape != (self.m * self.m, self.m * self.m):
                raise ConfigurationError("xi table must have shape (m^2, m^2)")
            if not np.array_equal(table, table.T):
                raise ConfigurationError("xi table must be symmetric")
            if table.min() <= 0:
                raise ConfigurationError("xi must be positive")
            object.__setattr__(self, "table", table)
        elif self.xi_const <= 0:
            raise ConfigurationError("xi must be positive")

    @classmethod
    def constant(cls, alpha: float, xi: float = 1.0) -> "WeightSpec":
        return cls(alpha=alpha, xi_const=xi)

    @classmethod
    def tabulated(cls, alpha: float, table) -> "WeightSpec":
        table = np.asarray(table, dtype=np.float64)
        m = int(round(math.sqrt(table.shape[0])))
        return cls(alpha=alpha, table=table, m=m)

    @property
    def is_constant(self) -> bool:
        return self.table is None

    @property
    def xi_min(self) -> float:
        return self.xi_const if self.table is None else float(self.table.min())

    @property
    def xi_max(self) -> float:
        return self.xi_const if self.table is None else float(self.table.max())

    def __eq__(self, other):
        if not isinstance(other, WeightSpec):
            return NotImplemented
        if self.alpha != other.alpha or self.m != other.m:
            return False
        if (self.table is None) != (other.table is None):
            return False
        if self.table is None:
            return self.xi_const == other.xi_const
        return bool(np.all(self.table == other.table))

    def xi_values(self, x1, y1, x2, y2):
        """xi at the given endpoint pairs (vectorized, exactly symmetric)."""
        if self.table is None:
            return np.full(np.shape(x1), self.xi_const)
        m = self.m
        c1 = np.minimum((np.asarray(x1) * m).astype(np.int64), m - 1) * m \
            + np.minimum((np.asarray(y1) * m).astype(np.int64), m - 1)
        c2 = np.minimum((np.asarray(x2) * m).astype(np.int64), m - 1) * m \
            + np.minimum((np.asarray(y2) * m).astype(np.int64), m - 1)
        return self.table[c1, c2]

    def weight_from(self, dist, xi):
        """w = d^alpha * xi, with a fast path for alpha == 1."""
        if self.alpha == 1.0:
            return dist * xi
        return dist ** self.alpha * xi


class Radius(NamedTuple):
    """An adjacency radius plus whether the stated-regime constant is met."""

    value: float
    meets_theorem_m: bool | None  # None for custom rules


def radius_for(n: int, M: float | None = None,
               custom: float | Callable[[int], float] | None = None,
               eps1: float = 1.0) -> Radius:
    """Adjacency radius for n nodes.

    Either the connectivity-regime rule sqrt(M * ln(n) / n) (flagging,
    non-fatally, when M <= 1600/eps1) or a custom rule (a constant or a
    callable of n). A radius outside (0, 1] is a parameter error: the model
    lives on the unit square.
    """
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    if (M is None) == (custom is None):
        raise ParameterError("give exactly one of M or custom")
    if custom is not None:
        r = float(custom(n)) if callable(custom) else float(custom)
        flag = None
    else:
        r = math.sqrt(M * math.log(n) / n)
        flag = M > THEOREM_M_FACTOR / eps1
    if not 0.0 < r <= 1.0:
        raise ParameterError(f"radius {r} outside (0, 1]")
    return Radius(r, flag)


def l2_scaling_term(n, r, alpha: float):
    """n^(alpha / (2 (1 + alpha))) * r: must vanish for L^2 convergence."""
    return np.asarray(n, dtype=np.float64) ** (alpha / (2.0 * (1.0 + alpha))) * r


@dataclass
class Rgg:
    """The geometric graph: points, radius, weighted edge list, grid index."""

    points: PointSet
    radius: float
    weights: WeightSpec
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_dist: np.ndarray
    grid_side: int
    cell_of_point: np.ndarray

    @property
    def n(self) -> int:
        return self.points.n

    @property
    def n_edges(self) -> int:
        return self.edge_i.shape[0]

    @cached_property
    def edge_weight(self) -> np.ndarray:
        xs, ys = self.points.xs, self.points.ys
        xi = self.weights.xi_values(xs[self.edge_i], ys[self.edge_i],
                                    xs[self.edge_j], ys[self.edge_j])
        return self.weights.weight_from(self.edge_dist, xi)

    def sort_key(self) -> np.ndarray:
        """Array whose ascending order is the ascending edge-weight order."""
        if self.weights.is_constant:
            return self.edge_dist  # d -> d^alpha * xi is monotone
        return self.edge_weight

    def to_csv(self, path) -> None:
        w = self.edge_weight
        order = np.lexsort((self.edge_j, self.edge_i))
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "dist", "weight"])
            for k in order:
                writer.writerow([int(self.edge_i[k]), int(self.edge_j[k]),
                                 repr(float(self.edge_dist[k])), repr(float(w[k]))])


def build_rgg(points: PointSet, radius: float, weights: WeightSpec) -> Rgg:
    """Edge set = exactly the pairs at distance < radius, via grid buckets."""
    if not 0.0 < radius <= 1.0:
        raise ParameterError(f"radius {radius} outside (0, 1]")
    ei, ej, dist = _kernels.edges_within(points.xs, points.ys, radius)
    side = max(1, int(1.0 / radius))
    cx = np.minimum((points.xs * side).astype(np.int64), side - 1)
    cy = np.minimum((points.ys * side).astype(np.int64), side - 1)
    return Rgg(points=points, radius=radius, weights=weights,
               edge_i=ei, edge_j=ej, edge_dist=dist,
               grid_side=side, cell_of_point=cx * side + cy)


def is_connected(g: Rgg) -> bool:
    """True iff the graph has exactly one component (union-find over edges)."""
    return _kernels.count_components(g.n, g.edge_i, g.edge_j) == 1


def brute_force_edges(points: PointSet, radius: float):
    """O(n^2) all-pairs edge enumeration; test oracle for the grid kernel."""
    xs, ys = points.xs, points.ys
    n = points.n
    ii, jj = np.triu_indices(n, k=1)
    dd = (xs[ii] - xs[jj]) ** 2 + (ys[ii] - ys[jj]) ** 2
    keep = dd < radius * radius
    return (ii[keep].astype(np.int32), jj[keep].astype(np.int32),
            np.sqrt(dd[keep]))
