"""Point-process samplers on the unit square.

Densities are bounded between eps1 and eps2 (eps1 <= 1 <= eps2, which is
forced by the density integrating to one). The supported processes:

* binomial(n): exactly n i.i.d. points with density f,
* poisson(n):  Poisson(n) total count, points i.i.d. f given the count,
* homogeneous Poisson with a given intensity,
* coupled superposition: a green/red colouring such that the green points
  alone form one Poisson process and green+red together form another
  (inhomogeneous inside homogeneous for exponent <= 1, homogeneous inside
  inhomogeneous for exponent > 1).

All samplers are pure functions of (parameters, seed).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

GREEN = 0
RED = 1

_INTEGRAL_TOL = 1e-9


@dataclass(frozen=True)
class DensitySpec:
    """Piecewise-constant density on a k x k grid of the unit square.

    ``values[i, j]`` is the density on cell (i, j) (x-major); the uniform
    density is the k = 1 special case. eps1/eps2 are the declared bounds,
    which may be strictly wider than the actual range of the values.
    """

    values: np.ndarray
    eps1: float = 1.0
    eps2: float = 1.0

    def __post_init__(self):
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ConfigurationError("density grid must be square")
        object.__setattr__(self, "values", values)
        if not (0.0 < self.eps1 <= 1.0 <= self.eps2):
            raise ConfigurationError(
                f"need 0 < eps1 <= 1 <= eps2, got eps1={self.eps1}, eps2={self.eps2}")
        if values.min() < self.eps1 - 1e-12 or values.max() > self.eps2 + 1e-12:
            raise ConfigurationError("density values outside [eps1, eps2]")
        # cells all have area 1/k^2, so the integral is the mean value
        if abs(values.mean() - 1.0) > _INTEGRAL_TOL:
            raise ConfigurationError(
                f"density integrates to {values.mean()!r}, not 1")

    @classmethod
    def uniform(cls, eps1: float = 1.0, eps2: float = 1.0) -> "DensitySpec":
        return cls(values=np.ones((1, 1)), eps1=eps1, eps2=eps2)

    @classmethod
    def from_grid(cls, values, eps1: float | None = None,
                  eps2: float | None = None) -> "DensitySpec":
        values = np.asarray(values, dtype=np.float64)
        if eps1 is None:
            eps1 = min(float(values.min()), 1.0)
        if eps2 is None:
            eps2 = max(float(values.max()), 1.0)
        return cls(values=values, eps1=eps1, eps2=eps2)

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.values == self.values.flat[0]))

    def __eq__(self, other):
        if not isinstance(other, DensitySpec):
            return NotImplemented
        return (self.eps1 == other.eps1 and self.eps2 == other.eps2
                and self.values.shape == other.values.shape
                and bool(np.all(self.values == other.values)))

    def evaluate(self, xs, ys):
        """Density values at the given coordinates (vectorized)."""
        xs = np.asarray(xs)
        ys = np.asarray(ys)
        k = self.k
        cx = np.minimum((xs * k).astype(np.int64), k - 1)
        cy = np.minimum((ys * k).astype(np.int64), k - 1)
        return self.values[cx, cy]

    def cell_probabilities(self) -> np.ndarray:
        """Exact probability mass of each grid cell."""
        return self.values / self.values.size


@dataclass
class PointSet:
    """A sampled configuration with its process metadata."""

    xs: np.ndarray
    ys: np.ndarray
    process: str
    seed: int | None = None
    colors: np.ndarray | None = None  # GREEN/RED for coupled processes
    proposals: int = 0  # rejection-sampler proposals, for acceptance-rate checks

    def __post_init__(self):
        self.xs = np.ascontiguousarray(self.xs, dtype=np.float64)
        self.ys = np.ascontiguousarray(self.ys, dtype=np.float64)
        if self.xs.shape != self.ys.shape:
            raise ConfigurationError("xs/ys length mismatch")
        if self.xs.size and (self.xs.min() < 0 or self.xs.max() > 1
                             or self.ys.min() < 0 or self.ys.max() > 1):
            raise ConfigurationError("coordinates outside the unit square")

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    def green_subset(self) -> "PointSet":
        """The green points of a coupled configuration, as their own set."""
        if self.colors is None:
            raise ConfigurationError("not a coupled point set")
        mask = self.colors == GREEN
        return PointSet(self.xs[mask], self.ys[mask], process=self.process + ":green",
                        seed=self.seed)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "color"])
            colors = self.colors
            for k in range(self.n):
                color = "" if colors is None else ("green" if colors[k] == GREEN else "red")
                writer.writerow([repr(float(self.xs[k])), repr(float(self.ys[k])), color])


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _rejection_sample(rng, count, accept_fn, envelope_rate):
    """count points with acceptance probability accept_fn(x, y) per proposal.

    envelope_rate is a lower bound on the mean acceptance rate, used only to
    size proposal batches. Returns (xs, ys, n_proposed).
    """
    xs = np.empty(count)
    ys = np.empty(count)
    got = 0
    proposed = 0
    while got < count:
        batch = max(64, int(1.2 * (count - got) / max(envelope_rate, 1e-9)))
        px = rng.random(batch)
        py = rng.random(batch)
        u = rng.random(batch)
        keep_idx = np.flatnonzero(u < accept_fn(px, py))
        take = min(keep_idx.size, count - got)
        idx = keep_idx[:take]
        xs[got:got + take] = px[idx]
        ys[got:got + take] = py[idx]
        got += take
        # count only the proposals the sequential sampler would consume
        proposed += int(keep_idx[take - 1]) + 1 if got == count else batch
    return xs, ys, proposed


def sample_binomial(n: int, density: DensitySpec, seed) -> PointSet:
    """Exactly n i.i.d. points with the given density.

    Rejection sampling against the constant envelope eps2, so the acceptance
    rate per proposal is 1/eps2.
    """
    if n < 1:
        raise ConfigurationError(f"need n >= 1, got {n}")
    rng = _rng(seed)
    eps2 = density.eps2
    xs, ys, proposed = _rejection_sample(
        rng, n, lambda px, py: density.evaluate(px, py) / eps2, 1.0 / eps2)
    return PointSet(xs, ys, process=f"binomial({n})", seed=_as_seed(seed),
                    proposals=proposed)


def sample_poisson(n: float, density: DensitySpec, seed) -> PointSet:
    """Poisson process with intensity n*f: Poisson(n) count, then i.i.d. f draws."""
    if n < 1:
        raise ConfigurationError(f"need n >= 1, got {n}")
    rng = _rng(seed)
    count = int(rng.poisson(n))
    if count == 0:
        return PointSet(np.empty(0), np.empty(0), process=f"poisson({n})",
                        seed=_as_seed(seed))
    eps2 = density.eps2
    xs, ys, proposed = _rejection_sample(
        rng, count, lambda px, py: density.evaluate(px, py) / eps2, 1.0 / eps2)
    return PointSet(xs, ys, process=f"poisson({n})", seed=_as_seed(seed),
                    proposals=proposed)


def sample_homogeneous(intensity: float, seed) -> PointSet:
    """Homogeneous Poisson process with the given total intensity."""
    rng = _rng(seed)
    count = int(rng.poisson(intensity))
    return PointSet(rng.random(count), rng.random(count),
                    process=f"homogeneous-poisson({intensity})", seed=_as_seed(seed))


def sample_coupled(n: float, density: DensitySpec, alpha_regime: str, seed) -> PointSet:
    """Green/red superposition realizing the monotone coupling.

    alpha_regime "<=1": green ~ intensity n*f, red ~ n*(eps2 - f); the union
    is homogeneous with intensity n*eps2. alpha_regime ">1": green is
    homogeneous with intensity n*eps1, red ~ n*(f - eps1); the union has
    intensity n*f. Green points come first in the arrays, so the green set is
    pathwise contained in the union.
    """
    if alpha_regime not in ("<=1", ">1"):
        raise ConfigurationError(f"alpha_regime must be '<=1' or '>1', got {alpha_regime!r}")
    rng = _rng(seed)
    eps1, eps2 = density.eps1, density.eps2
    if alpha_regime == "<=1":
        n_green = int(rng.poisson(n))
        gx, gy, _ = _rejection_sample(
            rng, n_green, lambda px, py: density.evaluate(px, py) / eps2, 1.0 / eps2)
        # red intensity n*(eps2 - f); total mass n*(eps2 - 1)
        n_red = int(rng.poisson(n * (eps2 - 1.0)))
        rx, ry, _ = _rejection_sample(
            rng, n_red, lambda px, py: (eps2 - density.evaluate(px, py)) / eps2,
            (eps2 - 1.0) / eps2 if eps2 > 1.0 else 1.0)
    else:
        n_green = int(rng.poisson(n * eps1))
        gx, gy = rng.random(n_green), rng.random(n_green)
        n_red = int(rng.poisson(n * (1.0 - eps1)))
        rx, ry, _ = _rejection_sample(
            rng, n_red, lambda px, py: (density.evaluate(px, py) - eps1) / (eps2 - eps1)
            if eps2 > eps1 else np.zeros_like(px),
            (1.0 - eps1) / (eps2 - eps1) if eps2 > eps1 else 1.0)
    xs = np.concatenate([gx, rx])
    ys = np.concatenate([gy, ry])
    colors = np.concatenate([np.full(n_green, GREEN, dtype=np.uint8),
                             np.full(n_red, RED, dtype=np.uint8)])
    return PointSet(xs, ys, process=f"coupled({alpha_regime})", seed=_as_seed(seed),
                    colors=colors)


def _as_seed(seed):
    return seed if isinstance(seed, int) else None
