"""Analytic constants and thresholds for the expectation/deviation bounds.

For a box parameter A > 0:

    C1(A) = 0.5 * xi_min * A^(alpha-2) * (1 - exp(-eps1 A^2)) * exp(-8 eps2 A^2)
    C2(A) = xi_max * (2A)^alpha * (1 + E[T^alpha] / A^2)

with T geometric of success parameter p = 1 - exp(-delta A^2). The two
optimized constants are beta_low = sup_A C1(A) and beta_up = inf_A C2(A);
in the homogeneous unit case with alpha = 1 they come out near 0.0735633
and 4.46256.

delta(alpha) is defined twice in the source material with opposite
assignments; both are implemented behind ``delta_rule`` ("section1":
eps1 for alpha <= 1, eps2 otherwise; "section3": the swap). They agree in
the homogeneous case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, DomainError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

GEO_SERIES_REL_TOL = 1e-14
GEO_SERIES_MAX_TERMS = 10 ** 7


@dataclass(frozen=True)
class BoundParams:
    """Density bounds, weight-factor bounds, exponent and the delta rule."""

    eps1: float = 1.0
    eps2: float = 1.0
    xi_min: float = 1.0
    xi_max: float = 1.0
    alpha: float = 1.0
    delta_rule: str = "section1"

    def __post_init__(self):
        if not (0.0 < self.eps1 <= 1.0 <= self.eps2):
            raise ConfigurationError("need 0 < eps1 <= 1 <= eps2")
        if not (0.0 < self.xi_min <= self.xi_max):
            raise ConfigurationError("need 0 < xi_min <= xi_max")
        if self.alpha <= 0.0:
            raise ConfigurationError("need alpha > 0")
        if self.delta_rule not in ("section1", "section3"):
            raise ConfigurationError("delta_rule must be 'section1' or 'section3'")

    @classmethod
    def homogeneous(cls, alpha: float = 1.0, **kw) -> "BoundParams":
        return cls(alpha=alpha, **kw)

    @property
    def delta(self) -> float:
        if self.delta_rule == "section1":
            return self.eps1 if self.alpha <= 1.0 else self.eps2
        return self.eps2 if self.alpha <= 1.0 else self.eps1


def geometric_moment(alpha: float, p: float,
                     rel_tol: float = GEO_SERIES_REL_TOL,
                     max_terms: int = GEO_SERIES_MAX_TERMS) -> float:
    """E[T^alpha] for T geometric with success parameter p.

    Series sum_{k>=1} k^alpha (1-p)^(k-1) p in log space, in blocks, stopped
    once a rigorous geometric tail bound drops below rel_tol of the partial
    sum. Raises if the term cap binds before that (happens for p below
    roughly 5e-6). The alpha = 1 result is cross-checked against 1/p.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"need success parameter in (0, 1), got {p}")
    if alpha <= 0.0:
        raise DomainError(f"need alpha > 0, got {alpha}")
    logq = math.log1p(-p)
    logp = math.log(p)
    q = 1.0 - p

    block_sums = []
    total = 0.0
    k0 = 1
    block = 4096
    converged = False
    while k0 <= max_terms:
        k1 = min(k0 + block - 1, max_terms)
        k = np.arange(k0, k1 + 1, dtype=np.float64)
        s = float(np.exp(alpha * np.log(k) + (k - 1.0) * logq + logp).sum())
        block_sums.append(s)
        total += s
        k_next = k1 + 1
        t_next = math.exp(alpha * math.log(k_next) + (k_next - 1) * logq + logp)
        rho = q * ((k_next + 1.0) / k_next) ** alpha
        if rho < 1.0 and t_next / (1.0 - rho) < rel_tol * total:
            converged = True
            break
        k0 = k1 + 1
        block = min(block * 2, 1 << 20)
    if not converged:
        raise DomainError(
            f"geometric moment series did not reach rel_tol={rel_tol} within "
            f"{max_terms} terms (alpha={alpha}, p={p})")
    result = math.fsum(block_sums)
    if alpha == 1.0:
        closed = 1.0 / p
        if abs(result - closed) > 1e-12 * closed:
            raise AssertionError(
                f"series {result} disagrees with closed form {closed} at alpha=1")
    return result


def _moment_lower_bound(alpha: float, p: float) -> float:
    # E[T^alpha] >= m^alpha P(T >= m) >= p^-alpha e^-2 with m = ceil(1/p); and >= 1
    return max(1.0, math.exp(-2.0) * p ** (-alpha))


def _moment_at(alpha: float, p: float) -> float:
    # large A saturates p to 1.0 in floats; then T == 1 almost surely
    return 1.0 if p >= 1.0 else geometric_moment(alpha, p)


def success_probability(A, params: BoundParams):
    """p = 1 - exp(-delta A^2) for the geometric gap variable."""
    return -np.expm1(-params.delta * np.asarray(A, dtype=np.float64) ** 2)


def c1(A, params: BoundParams):
    """Lower-bound constant C1(A) (vectorized in A)."""
    A = np.asarray(A, dtype=np.float64)
    if np.any(A <= 0):
        raise DomainError("need A > 0")
    val = (0.5 * params.xi_min * A ** (params.alpha - 2.0)
           * (-np.expm1(-params.eps1 * A ** 2))
           * np.exp(-8.0 * params.eps2 * A ** 2))
    return float(val) if val.ndim == 0 else val


def c2(A: float, params: BoundParams) -> float:
    """Upper-bound constant C2(A)."""
    if A <= 0:
        raise DomainError("need A > 0")
    p = float(success_probability(A, params))
    moment = _moment_at(params.alpha, p)
    return params.xi_max * (2.0 * A) ** params.alpha * (1.0 + moment / A ** 2)


class BoundSet(NamedTuple):
    """C1, C2 and the moment behind C2, evaluated at one A."""

    A: float
    c1: float
    c2: float
    geo_moment: float
    p: float


def bound_set(A: float, params: BoundParams) -> BoundSet:
    p = float(success_probability(A, params))
    return BoundSet(A, c1(A, params), c2(A, params), _moment_at(params.alpha, p), p)


def _golden(f, a: float, b: float, tol: float) -> float:
    """Golden-section minimizer of a unimodal f on [a, b]."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


class BetaOptima(NamedTuple):
    beta_low: float
    argmax_A: float
    beta_up: float
    argmin_A: float
    c1_multimodal: bool
    c2_multimodal: bool


def _count_local_optima(values: np.ndarray, minima: bool) -> int:
    inner = values[1:-1]
    if minima:
        hits = (inner < values[:-2]) & (inner < values[2:])
    else:
        hits = (inner > values[:-2]) & (inner > values[2:])
    return int(hits.sum())


def optimize_betas(params: BoundParams, tol: float = 1e-6,
                   grid_points: int = 10_000) -> BetaOptima:
    """beta_low = sup_A C1(A) and beta_up = inf_A C2(A).

    Deterministic geometric grid scan followed by golden-section refinement.
    C2 involves a series that cannot meet its tolerance for tiny A (p ~ 0),
    so grid points are pre-screened with a rigorous lower bound on C2 and the
    series is only evaluated where the optimum can still lie.
    """
    if tol <= 0:
        raise DomainError("need tol > 0")
    a_hi = max(4.0, math.sqrt(10.0 / params.eps2) + 1.0,
               math.sqrt(42.0 / params.delta) + 1.0)
    grid = np.geomspace(1e-3, a_hi, grid_points)

    c1_vals = c1(grid, params)
    i_best = int(np.argmax(c1_vals))
    lo = grid[max(i_best - 1, 0)]
    hi = grid[min(i_best + 1, grid_points - 1)]
    argmax_a = _golden(lambda A: -c1(A, params), lo, hi, tol)
    beta_low = c1(argmax_a, params)
    c1_multi = _count_local_optima(c1_vals, minima=False) > 1

    p_grid = success_probability(grid, params)
    lb_moment = np.maximum(1.0, math.exp(-2.0) * p_grid ** (-params.alpha))
    lb_c2 = (params.xi_max * (2.0 * grid) ** params.alpha
             * (1.0 + lb_moment / grid ** 2))
    i0 = int(np.argmin(lb_c2))
    provisional = c2(float(grid[i0]), params)
    cand = np.flatnonzero(lb_c2 <= provisional)
    exact = np.array([c2(float(grid[i]), params) for i in cand])
    j_best = int(np.argmin(exact))
    i_best = int(cand[j_best])
    lo = grid[max(i_best - 1, 0)]
    hi = grid[min(i_best + 1, grid_points - 1)]
    argmin_a = _golden(lambda A: c2(A, params), lo, hi, tol)
    beta_up = c2(argmin_a, params)
    c2_multi = _count_local_optima(exact, minima=True) > 1

    return BetaOptima(beta_low, argmax_a, beta_up, argmin_a, c1_multi, c2_multi)


class ANReport(NamedTuple):
    """The finite-n box parameter window and the constants' gap at A_n."""

    n: int
    window_lo: float
    window_hi: float
    a_n: float
    in_window: bool
    c1_gap: float
    c2_gap: float


def a_n_window(A: float, n: int):
    """[A + 1/ln(n)^(1/4), A + 2/ln(n)^(1/4))."""
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    shift = math.log(n) ** -0.25
    return A + shift, A + 2.0 * shift


def a_n_sequence(A: float, n: int, params: BoundParams,
                 plan_feedback: float | None = None) -> ANReport:
    """Convergence report |C_i(A_n) - C_i(A)| for the realized A_n.

    plan_feedback is the realized box parameter from a tiling plan; without
    one, the window's left endpoint is used as the canonical A_n.
    """
    lo, hi = a_n_window(A, n)
    a_n = lo if plan_feedback is None else plan_feedback
    return ANReport(n, lo, hi, a_n, lo <= a_n < hi,
                    abs(c1(a_n, params) - c1(A, params)),
                    abs(c2(a_n, params) - c2(A, params)))


class Thresholds(NamedTuple):
    lower: float
    upper: float
    lower_vacuous: bool


def theorem_thresholds(n: int, A_eff: float, params: BoundParams) -> Thresholds:
    """Deviation thresholds at finite n for the realized box parameter.

    lower: C1(A) n^(1-alpha/2) (1 - 36 sqrt(A)/n^(1/4)), clamped to 0 with a
    vacuous flag when the correction factor is not positive;
    upper: C2(A) n^(1-alpha/2) (1 + 1/n^(1/17)).
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    scale = n ** (1.0 - params.alpha / 2.0)
    low_factor = 1.0 - 36.0 * math.sqrt(A_eff) / n ** 0.25
    upper = c2(A_eff, params) * scale * (1.0 + n ** (-1.0 / 17.0))
    if low_factor <= 0.0:
        return Thresholds(0.0, upper, True)
    return Thresholds(c1(A_eff, params) * scale * low_factor, upper, False)


def bounds_table(params: BoundParams, a_values) -> list[BoundSet]:
    """(A, C1, C2) rows for reporting/plotting."""
    return [bound_set(float(A), params) for A in a_values]
