"""Minimum spanning forests: edge cases, oracle equivalence, invariants."""

import numpy as np
import pytest

from rggmst.errors import ParameterError
from rggmst.mst import brute_force_mst, minimum_spanning_forest, mst_degree_stats
from rggmst.rgg import WeightSpec, build_rgg
from rggmst.sampling import DensitySpec, PointSet, sample_binomial


def _points(xs, ys):
    return PointSet(np.asarray(xs, float), np.asarray(ys, float), "synthetic")


def _graph(xs, ys, r, alpha=1.0, xi=1.0):
    return build_rgg(_points(xs, ys), r, WeightSpec.constant(alpha, xi=xi))


def test_empty_graph():
    g = build_rgg(PointSet(np.empty(0), np.empty(0), "empty"), 0.5,
                  WeightSpec.constant(1.0))
    m = minimum_spanning_forest(g)
    assert m.total_weight == 0.0 and m.components == 0 and m.n_edges == 0


def test_single_node():
    m = minimum_spanning_forest(_graph([0.5], [0.5], 0.5))
    assert m.total_weight == 0.0 and m.components == 1 and not m.forest_flag


def test_collinear_path():
    m = minimum_spanning_forest(_graph([0.1, 0.2, 0.3], [0.5, 0.5, 0.5], 0.15))
    assert m.total_weight == pytest.approx(0.2, rel=1e-12)
    assert sorted(m.degrees.tolist()) == [1, 1, 2]
    assert m.components == 1


def test_brute_force_triangle():
    # weights (1, 2, 3) / 10: keep the two lightest
    g = _graph([0.1, 0.2, 0.4], [0.5, 0.5, 0.5], 1.0)
    m = brute_force_mst(g)
    assert m.n_edges == 2
    assert m.total_weight == pytest.approx(0.3, rel=1e-12)


def test_brute_force_square():
    # four corners, equal side s: any 3 of the 4 sides, total 3 s
    s = 0.5
    g = _graph([0.25, 0.25, 0.75, 0.75], [0.25, 0.75, 0.25, 0.75], 0.9)
    m = brute_force_mst(g)
    assert m.total_weight == pytest.approx(3 * s, rel=1e-12)
    k = minimum_spanning_forest(g)
    assert k.total_weight == m.total_weight  # ties: exact equality still holds


def test_brute_force_refusal():
    pts = sample_binomial(11, DensitySpec.uniform(), seed=0)
    g = build_rgg(pts, 0.9, WeightSpec.constant(1.0))
    with pytest.raises(ParameterError):
        brute_force_mst(g)


@pytest.mark.parametrize("seed", range(40))
def test_oracle_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    alpha = float(rng.choice([0.5, 1.0, 2.0]))
    r = float(rng.choice([0.4, 0.9, 1.0]))
    pts = sample_binomial(n, DensitySpec.uniform(), seed=seed + 500)
    g = build_rgg(pts, r, WeightSpec.constant(alpha))
    a = minimum_spanning_forest(g)
    b = brute_force_mst(g)
    assert a.total_weight == b.total_weight
    assert a.components == b.components
    assert a.n_edges == b.n_edges


def test_forest_disconnected_components():
    # two clusters far apart: forest sums per-component trees, no penalty
    xs = [0.1, 0.12, 0.14, 0.8, 0.82]
    ys = [0.5, 0.5, 0.5, 0.5, 0.5]
    m = minimum_spanning_forest(_graph(xs, ys, 0.1))
    assert m.components == 2 and m.forest_flag
    assert m.n_edges == 3
    assert m.total_weight == pytest.approx(0.02 + 0.02 + 0.02, rel=1e-9)


def test_degree_sum_invariant():
    pts = sample_binomial(400, DensitySpec.uniform(), seed=4)
    g = build_rgg(pts, 0.08, WeightSpec.constant(1.0))
    m = minimum_spanning_forest(g)
    assert int(m.degrees.sum()) == 2 * m.n_edges
    assert m.degrees.sum() <= 2 * m.n
    assert m.n_edges == m.n - m.components


def test_degree_stats_path_and_star():
    path = minimum_spanning_forest(_graph([0.1, 0.2, 0.3], [0.5] * 3, 0.15))
    assert mst_degree_stats(path)[0] == 2
    # center with four satellites; satellite-satellite edges exist but are heavier
    xs = [0.5, 0.5, 0.5, 0.3, 0.7]
    ys = [0.5, 0.3, 0.7, 0.5, 0.5]
    star = minimum_spanning_forest(_graph(xs, ys, 0.45))
    max_deg, hist = mst_degree_stats(star)
    assert max_deg == 4
    assert hist.tolist() == [0, 4, 0, 0, 1]


def test_cut_property_spot_check():
    pts = sample_binomial(40, DensitySpec.uniform(), seed=12)
    g = build_rgg(pts, 0.5, WeightSpec.constant(1.0))
    m = minimum_spanning_forest(g)
    assert m.components == 1
    adj = {v: set() for v in range(m.n)}
    for i, j, _ in m.edge_list():
        adj[i].add(j)
        adj[j].add(i)
    for i, j, w in m.edge_list():
        # side of the cut containing i once (i, j) is removed
        side = {i}
        stack = [i]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if (u, v) != (i, j) and (v, u) != (i, j) and v not in side:
                    side.add(v)
                    stack.append(v)
        crossing = (np.isin(g.edge_i, list(side)) != np.isin(g.edge_j, list(side)))
        assert g.edge_weight[crossing].min() >= w - 1e-15


def test_scaling_covariance():
    pts = sample_binomial(120, DensitySpec.uniform(), seed=6)
    base = minimum_spanning_forest(build_rgg(pts, 0.3, WeightSpec.constant(1.5, xi=1.0)))
    scaled = minimum_spanning_forest(build_rgg(pts, 0.3, WeightSpec.constant(1.5, xi=2.5)))
    assert scaled.total_weight == pytest.approx(2.5 * base.total_weight, rel=1e-12)
    assert np.array_equal(base.edge_i, scaled.edge_i)
    assert np.array_equal(base.edge_j, scaled.edge_j)


def test_mst_monotone_in_radius_when_connected():
    pts = sample_binomial(200, DensitySpec.uniform(), seed=30)
    spec = WeightSpec.constant(1.0)
    small = minimum_spanning_forest(build_rgg(pts, 0.15, spec))
    large = minimum_spanning_forest(build_rgg(pts, 0.3, spec))
    if small.components == 1 and large.components == 1:
        assert large.total_weight <= small.total_weight * (1 + 1e-12)


def test_mst_output_formats(tmp_path):
    pts = sample_binomial(20, DensitySpec.uniform(), seed=1)
    m = minimum_spanning_forest(build_rgg(pts, 0.6, WeightSpec.constant(1.0)))
    m.to_csv(tmp_path / "mst.csv")
    assert (tmp_path / "mst.csv").read_text().startswith("i,j,weight")
    summary = m.to_json(tmp_path / "mst.json")
    assert summary["n"] == 20 and summary["n_edges"] == m.n_edges
