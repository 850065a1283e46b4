"""RGG construction: adjacency cutoff, weights, radius rules."""

import math

import numpy as np
import pytest

from rggmst.errors import ConfigurationError, ParameterError
from rggmst.rgg import (WeightSpec, build_rgg, brute_force_edges,
                        is_connected, l2_scaling_term, radius_for)
from rggmst.sampling import DensitySpec, PointSet, sample_binomial


def _points(xs, ys):
    return PointSet(np.asarray(xs, float), np.asarray(ys, float), "synthetic")


def _random_symmetric_table(rng, m):
    raw = rng.uniform(0.5, 2.0, size=(m * m, m * m))
    return (raw + raw.T) / 2.0


def test_weight_spec_validation():
    with pytest.raises(ConfigurationError):
        WeightSpec.constant(0.0)
    with pytest.raises(ConfigurationError):
        WeightSpec.constant(1.0, xi=-1.0)
    with pytest.raises(ConfigurationError):  # asymmetric table
        WeightSpec(alpha=1.0, table=np.array([[1.0, 2.0], [3.0, 1.0]]),
                   m=int(math.sqrt(2)) + 1)


def test_radius_theorem_constants_exceed_unit_square():
    # sqrt(1600 ln(1e4) / 1e4) = 1.2139... > 1: the regime constant is asymptotic
    with pytest.raises(ParameterError):
        radius_for(10 ** 4, M=1600.0)
    assert math.sqrt(1600.0 * math.log(1e4) / 1e4) == pytest.approx(1.2139417, abs=1e-6)


def test_radius_theorem_flag():
    r = radius_for(10 ** 9, M=1700.0, eps1=1.0)
    assert r.meets_theorem_m is True
    r = radius_for(10 ** 9, M=1500.0, eps1=1.0)
    assert r.meets_theorem_m is False
    r = radius_for(10 ** 9, M=900.0, eps1=0.5)  # needs M > 3200
    assert r.meets_theorem_m is False


def test_radius_custom_rule():
    assert radius_for(10 ** 6, custom=lambda n: n ** (-1 / 3)).value == pytest.approx(0.01)
    assert radius_for(100, custom=0.25).value == 0.25
    with pytest.raises(ParameterError):
        radius_for(100, custom=1.5)
    with pytest.raises(ParameterError):
        radius_for(100)  # neither M nor custom


def test_l2_condition_along_sequence():
    # alpha = 1, r = n^(-1/3): n^(1/4) r_n = n^(-1/12) decreases to 0
    ns = np.array([10 ** k for k in range(3, 9)], dtype=float)
    vals = l2_scaling_term(ns, ns ** (-1 / 3), alpha=1.0)
    assert np.all(np.diff(vals) < 0)


def test_build_rgg_below_threshold():
    g = build_rgg(_points([0.2, 0.7], [0.5, 0.5]), 0.4, WeightSpec.constant(1.0))
    assert g.n_edges == 0


def test_build_rgg_collinear_weights():
    g = build_rgg(_points([0.1, 0.2, 0.3], [0.5, 0.5, 0.5]), 0.15,
                  WeightSpec.constant(1.0))
    assert g.n_edges == 2
    assert np.allclose(np.sort(g.edge_weight), [0.1, 0.1], rtol=1e-12)


def test_grid_equals_brute_force_200():
    pts = sample_binomial(200, DensitySpec.uniform(), seed=17)
    g = build_rgg(pts, 0.2, WeightSpec.constant(1.0))
    bi, bj, bd = brute_force_edges(pts, 0.2)
    assert set(zip(g.edge_i.tolist(), g.edge_j.tolist())) \
        == set(zip(bi.tolist(), bj.tolist()))


@pytest.mark.parametrize("seed", range(10))
def test_grid_equals_brute_force_property(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 501))
    r = float(rng.uniform(0.02, 1.0))
    pts = sample_binomial(n, DensitySpec.uniform(), seed=seed + 1000)
    g = build_rgg(pts, r, WeightSpec.constant(1.0))
    bi, bj, _ = brute_force_edges(pts, r)
    assert set(zip(g.edge_i.tolist(), g.edge_j.tolist())) \
        == set(zip(bi.tolist(), bj.tolist()))


def test_stored_weights_match_definition():
    rng = np.random.default_rng(3)
    pts = sample_binomial(150, DensitySpec.uniform(), seed=8)
    spec = WeightSpec.tabulated(1.7, _random_symmetric_table(rng, 3))
    g = build_rgg(pts, 0.3, spec)
    xs, ys = pts.xs, pts.ys
    for k in range(0, g.n_edges, 7):
        i, j = int(g.edge_i[k]), int(g.edge_j[k])
        d = math.hypot(xs[i] - xs[j], ys[i] - ys[j])
        xi = float(spec.xi_values(xs[i], ys[i], xs[j], ys[j]))
        assert g.edge_weight[k] == pytest.approx(d ** 1.7 * xi, rel=1e-12)


def test_weight_symmetry():
    rng = np.random.default_rng(5)
    spec = WeightSpec.tabulated(2.0, _random_symmetric_table(rng, 4))
    x1, y1 = rng.random(50), rng.random(50)
    x2, y2 = rng.random(50), rng.random(50)
    assert np.array_equal(spec.xi_values(x1, y1, x2, y2),
                          spec.xi_values(x2, y2, x1, y1))
    assert spec.xi_min <= spec.xi_values(x1, y1, x2, y2).min()
    assert spec.xi_values(x1, y1, x2, y2).max() <= spec.xi_max


def test_edge_monotonicity_in_radius():
    pts = sample_binomial(300, DensitySpec.uniform(), seed=21)
    spec = WeightSpec.constant(1.0)
    small = build_rgg(pts, 0.1, spec)
    large = build_rgg(pts, 0.17, spec)
    e_small = set(zip(small.edge_i.tolist(), small.edge_j.tolist()))
    e_large = set(zip(large.edge_i.tolist(), large.edge_j.tolist()))
    assert e_small <= e_large


def test_is_connected_cases():
    spec = WeightSpec.constant(1.0)
    assert is_connected(build_rgg(_points([0.5], [0.5]), 0.2, spec))
    assert not is_connected(build_rgg(_points([0.1, 0.9], [0.5, 0.5]), 0.2, spec))


def test_is_connected_serpentine_chain():
    # zig-zag chain with spacing r/2 is connected by construction
    r = 0.1
    xs, ys = [0.05], [0.05]
    direction = 1.0
    for _ in range(60):
        nx = xs[-1] + direction * r / 2
        if not 0.03 < nx < 0.97:
            direction = -direction
            ys.append(ys[-1] + r / 2)
            xs.append(xs[-1])
        else:
            xs.append(nx)
            ys.append(ys[-1])
    g = build_rgg(_points(xs, ys), r, WeightSpec.constant(1.0))
    assert is_connected(g)


def test_rgg_csv_dump(tmp_path):
    pts = sample_binomial(30, DensitySpec.uniform(), seed=2)
    g = build_rgg(pts, 0.4, WeightSpec.constant(1.0))
    path = tmp_path / "edges.csv"
    g.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,j,dist,weight"
    assert len(lines) == g.n_edges + 1
