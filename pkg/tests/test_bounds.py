"""Analytic constants: moment series, C1/C2, optima, thresholds."""

import math

import numpy as np
import pytest

from rggmst.bounds import (BoundParams, a_n_sequence, a_n_window, bound_set,
                           c1, c2, geometric_moment, optimize_betas,
                           success_probability, theorem_thresholds)
from rggmst.errors import ConfigurationError, DomainError

HOMOGENEOUS = BoundParams.homogeneous(alpha=1.0)

# frozen against an independent high-precision evaluation (polylog form)
MOMENT_HALF_P03 = 1.6980510121622605
MOMENT_2_P03 = 18.888888888888889
MOMENT_37_P03 = 840.90799598395305


def test_params_validation():
    with pytest.raises(ConfigurationError):
        BoundParams(eps1=1.5)
    with pytest.raises(ConfigurationError):
        BoundParams(eps2=0.5)
    with pytest.raises(ConfigurationError):
        BoundParams(xi_min=2.0, xi_max=1.0)
    with pytest.raises(ConfigurationError):
        BoundParams(alpha=0.0)
    with pytest.raises(ConfigurationError):
        BoundParams(delta_rule="other")


def test_delta_rules():
    p1 = BoundParams(eps1=0.5, eps2=2.0, alpha=0.5, delta_rule="section1")
    p3 = BoundParams(eps1=0.5, eps2=2.0, alpha=0.5, delta_rule="section3")
    assert p1.delta == 0.5 and p3.delta == 2.0
    p1 = BoundParams(eps1=0.5, eps2=2.0, alpha=2.0, delta_rule="section1")
    p3 = BoundParams(eps1=0.5, eps2=2.0, alpha=2.0, delta_rule="section3")
    assert p1.delta == 2.0 and p3.delta == 0.5
    # homogeneous case: the two rules coincide
    assert BoundParams.homogeneous(0.5).delta == BoundParams.homogeneous(
        0.5, delta_rule="section3").delta


def test_geometric_moment_values():
    assert geometric_moment(1.0, 0.5) == pytest.approx(2.0, rel=1e-12)
    assert geometric_moment(2.0, 0.5) == pytest.approx(6.0, rel=1e-10)
    p = 1.0 - math.exp(-1.0)
    assert geometric_moment(1.0, p) == pytest.approx(1.5819767068693264, rel=1e-12)
    assert geometric_moment(0.5, 0.3) == pytest.approx(MOMENT_HALF_P03, rel=1e-12)
    assert geometric_moment(2.0, 0.3) == pytest.approx(MOMENT_2_P03, rel=1e-12)
    assert geometric_moment(3.7, 0.3) == pytest.approx(MOMENT_37_P03, rel=1e-12)


def test_geometric_moment_identities():
    for p in (0.1, 0.5, 0.9):
        assert geometric_moment(1.0, p) == pytest.approx(1.0 / p, rel=1e-12)
        assert geometric_moment(2.0, p) == pytest.approx((2.0 - p) / p ** 2,
                                                         rel=1e-10)


def test_geometric_moment_monotonicity():
    # increasing in 1/p, and in alpha for alpha >= 1 at fixed p < 1/2
    ps = [0.4, 0.3, 0.2, 0.1, 0.05]
    vals = [geometric_moment(1.5, p) for p in ps]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    alphas = [1.0, 1.5, 2.0, 3.0]
    vals = [geometric_moment(a, 0.3) for a in alphas]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_geometric_moment_domain_errors():
    with pytest.raises(DomainError):
        geometric_moment(1.0, 0.0)
    with pytest.raises(DomainError):
        geometric_moment(1.0, 1.0)
    with pytest.raises(DomainError):
        geometric_moment(0.0, 0.5)
    with pytest.raises(DomainError):  # cap binds: tolerance unreachable
        geometric_moment(1.0, 1e-7)


def test_c1_values():
    # 2 (1 - e^-1/16) e^-1/2, frozen from a 40-digit evaluation
    assert c1(0.25, HOMOGENEOUS) == pytest.approx(0.073495669963420828, rel=1e-12)
    # C1 -> 0 as A -> 0 (like eps1 A^alpha / 2)
    assert c1(1e-4, HOMOGENEOUS) < 1e-4
    assert c1(1e-6, HOMOGENEOUS) < c1(1e-4, HOMOGENEOUS)
    # 1 - e^-x <= 1
    for A in (0.1, 0.5, 1.0, 2.0):
        cap = 0.5 * A ** (-1.0) * math.exp(-8.0 * A ** 2)
        assert c1(A, HOMOGENEOUS) <= cap


def test_c2_values():
    assert c2(1.0, HOMOGENEOUS) == pytest.approx(5.1639534137386528, rel=1e-12)
    expected_14 = 2.8 * (1.0 + 1.0 / ((1.0 - math.exp(-1.96)) * 1.96))
    assert c2(1.4, HOMOGENEOUS) == pytest.approx(expected_14, rel=1e-12)
    # C2 ~ 2 xi_max A as A grows
    assert c2(50.0, HOMOGENEOUS) > c2(20.0, HOMOGENEOUS) > c2(10.0, HOMOGENEOUS)
    assert c2(50.0, HOMOGENEOUS) == pytest.approx(100.0, rel=1e-2)


def test_c_continuity():
    for A in (0.25, 1.0, 1.4):
        gaps = [abs(c1(A + h, HOMOGENEOUS) - c1(A, HOMOGENEOUS)) for h in (1e-2, 1e-4)]
        assert gaps[1] < gaps[0]
        gaps = [abs(c2(A + h, HOMOGENEOUS) - c2(A, HOMOGENEOUS)) for h in (1e-2, 1e-4)]
        assert gaps[1] < gaps[0]


def test_optimize_betas_homogeneous():
    opt = optimize_betas(HOMOGENEOUS)
    assert opt.beta_low == pytest.approx(0.0735633, abs=1e-4)
    assert opt.beta_up == pytest.approx(4.46256, abs=1e-4)
    assert not opt.c1_multimodal and not opt.c2_multimodal
    # optimum bounds dominate the curves on a grid
    for A in np.geomspace(0.02, 4.0, 50):
        assert c1(float(A), HOMOGENEOUS) <= opt.beta_low * (1 + 1e-9)
        assert c2(float(A), HOMOGENEOUS) >= opt.beta_up * (1 - 1e-9)


def test_optimize_betas_scaling_in_xi():
    base = optimize_betas(HOMOGENEOUS)
    scaled = optimize_betas(BoundParams(xi_min=3.0, xi_max=3.0, alpha=1.0))
    assert scaled.beta_low == pytest.approx(3.0 * base.beta_low, rel=1e-6)
    assert scaled.beta_up == pytest.approx(3.0 * base.beta_up, rel=1e-6)
    assert scaled.argmax_A == pytest.approx(base.argmax_A, abs=1e-4)
    assert scaled.argmin_A == pytest.approx(base.argmin_A, abs=1e-4)


def test_bound_set():
    bset = bound_set(1.0, HOMOGENEOUS)
    assert bset.p == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)
    assert bset.c2 == pytest.approx(2.0 * (1.0 + bset.geo_moment), rel=1e-12)


def test_a_n_window_and_sequence():
    lo3, hi3 = a_n_window(1.0, 10 ** 3)
    lo7, hi7 = a_n_window(1.0, 10 ** 7)
    assert hi3 - lo3 > hi7 - lo7  # window narrows
    assert lo3 > lo7 > 1.0
    # C2 is increasing past its minimum, so with A = 2 the gap is monotone
    gaps = [a_n_sequence(2.0, 10 ** k, HOMOGENEOUS).c2_gap for k in range(3, 8)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    exact = a_n_sequence(2.0, 10 ** 4, HOMOGENEOUS, plan_feedback=2.0)
    assert exact.c1_gap == 0.0 and exact.c2_gap == 0.0
    off = a_n_sequence(1.0, 10 ** 4, HOMOGENEOUS, plan_feedback=1.1)
    assert off.c2_gap > 0.0


def test_theorem_thresholds():
    thr = theorem_thresholds(10 ** 4, 0.25, HOMOGENEOUS)
    # 1 - 36 sqrt(0.25) / 10 = -0.8: vacuous at desk scale
    assert thr.lower_vacuous and thr.lower == 0.0
    thr_large = theorem_thresholds(10 ** 12, 0.25, HOMOGENEOUS)
    assert not thr_large.lower_vacuous
    factor = thr_large.lower / (c1(0.25, HOMOGENEOUS) * (10 ** 12) ** 0.5)
    assert factor == pytest.approx(0.982, abs=1e-12)
    thr4 = theorem_thresholds(10 ** 4, 1.0, HOMOGENEOUS)
    upfactor = thr4.upper / (c2(1.0, HOMOGENEOUS) * (10 ** 4) ** 0.5)
    assert upfactor == pytest.approx(1.0 + 10 ** (-4.0 / 17.0), rel=1e-12)
    assert upfactor == pytest.approx(1.5817, abs=1e-4)


def test_success_probability():
    p = BoundParams(eps1=0.5, eps2=2.0, alpha=1.0)  # delta = eps1 = 0.5
    assert success_probability(1.0, p) == pytest.approx(1 - math.exp(-0.5), rel=1e-12)
