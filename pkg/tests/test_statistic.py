import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hindep.core import PairedDataset, SampleGrid
from hindep.errors import ParameterError
from hindep.processes import example_pair
from hindep.statistic import (EvalGrid, StatisticConfig, auto_G, candidate_directions,
                              discrepancy_surface, projection_scores, sup_discrepancy,
                              t_statistic)

from oracles import naive_surface


def test_lattice_points():
    assert np.allclose(EvalGrid(2.0, 4).points, [-2, -1, 0, 1, 2])
    with pytest.raises(ParameterError):
        EvalGrid(0.0, 4)
    with pytest.raises(ParameterError):
        EvalGrid(1.0, 0)


def test_single_point_surface_is_zero():
    s = discrepancy_surface([0.0], [0.0], 1.0, EvalGrid(1.0, 2), "paper")
    assert s[1, 1] == 0.0


@pytest.mark.parametrize("normalization", ["paper", "standard"])
def test_surface_matches_naive(normalization):
    rng = np.random.default_rng(5)
    px, py = rng.standard_normal((2, 50))
    grid = EvalGrid(3.0, 8)
    fast = discrepancy_surface(px, py, 0.6, grid, normalization)
    slow = naive_surface(px, py, 0.6, grid.points, normalization)
    assert np.max(np.abs(fast - slow)) < 1e-12


def test_surface_errors():
    with pytest.raises(ParameterError):
        discrepancy_surface([0.0], [0.0, 1.0], 1.0, EvalGrid(1.0, 2))
    with pytest.raises(ParameterError):
        discrepancy_surface([0.0], [0.0], 0.0, EvalGrid(1.0, 2))
    with pytest.raises(ParameterError):
        discrepancy_surface([0.0], [0.0], 1.0, EvalGrid(1.0, 2), "other")


def test_independent_surface_is_small():
    rng = np.random.default_rng(6)
    px = rng.standard_normal(4000)
    py = rng.permutation(px)
    s = discrepancy_surface(px, py, 0.3, EvalGrid(3.0, 12), "standard")
    assert s.max() < 0.02


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 40), st.integers(1, 6), st.integers(1, 7), st.integers(0, 10**6))
def test_sup_matches_bruteforce(n, nx, ny, seed):
    rng = np.random.default_rng(seed)
    sx = rng.standard_normal((nx, n))
    sy = rng.standard_normal((ny, n))
    grid = EvalGrid(2.5, 6)
    val, ix, iy, a, b = sup_discrepancy(sx, sy, 0.5, grid)
    surfaces = np.array([[discrepancy_surface(sx[i], sy[j], 0.5, grid) for j in range(ny)]
                         for i in range(nx)])
    assert val == pytest.approx(surfaces.max(), abs=1e-12)
    assert surfaces[ix, iy, a, b] == pytest.approx(val, abs=1e-12)


def test_sup_blocks_agree(monkeypatch):
    import hindep.statistic as stat
    rng = np.random.default_rng(7)
    sx, sy = rng.standard_normal((2, 30, 25))
    full = sup_discrepancy(sx, sy, 0.4, EvalGrid(2.0, 10))
    monkeypatch.setattr(stat, "_BLOCK_ENTRIES", 1)
    assert sup_discrepancy(sx, sy, 0.4, EvalGrid(2.0, 10)) == full


def _dataset(n=40, seed=0):
    return example_pair(7, n, SampleGrid(51), seed)


def test_degenerate_single_pair_single_point():
    ds = _dataset()
    cfg = StatisticConfig(M=4, n_dir=1, G=1.0, L=1, bandwidth_c=1.0)
    r = t_statistic(ds, cfg)
    dx, dy = candidate_directions(cfg)
    px = projection_scores(ds.x, dx, 4)[0]
    py = projection_scores(ds.y, dy, 4)[0]
    surf = discrepancy_surface(px, py, r.h, EvalGrid(1.0, 1))
    assert r.t_value == pytest.approx(surf.max(), rel=1e-14)


def test_nested_lattices_never_decrease():
    ds = _dataset()
    base = StatisticConfig(M=6, n_dir=16, G=4.0, L=10, bandwidth_c=0.5)
    vals = [t_statistic(ds, base.replace(L=L)).t_value for L in (10, 20, 40)]
    assert vals[0] <= vals[1] <= vals[2]


def test_result_fields_and_normalization():
    ds = _dataset()
    r = t_statistic(ds, StatisticConfig(M=6, n_dir=16))
    assert r.normalized == pytest.approx(np.sqrt(ds.n * r.h) * r.t_value)
    assert np.linalg.norm(r.direction_x) == pytest.approx(1)
    assert -r.G <= r.s <= r.G and -r.G <= r.t <= r.G
    assert r.bandwidth_c > 0


def test_auto_G_covers_scores():
    sx = np.array([[0.5, -3.0]])
    sy = np.array([[1.0, 2.0]])
    assert auto_G(sx, sy, 0.25) == 3.25


def test_grid_directions_shared():
    dx, dy = candidate_directions(StatisticConfig(M=3, grid_K=3))
    assert dx is dy and dx.shape == (9, 3)


def test_config_validation():
    with pytest.raises(ParameterError):
        StatisticConfig(M=1)
    with pytest.raises(ParameterError):
        StatisticConfig(normalization="x")
    with pytest.raises(ParameterError):
        StatisticConfig(bandwidth_c=-1.0)


def test_independent_vs_dependent_ordering():
    g = SampleGrid(51)
    cfg = StatisticConfig(M=6, n_dir=32, bandwidth_c=0.5, normalization="standard")
    dep = t_statistic(example_pair(7, 200, g, 1), cfg).normalized
    ind = t_statistic(example_pair(4, 200, g, 1), cfg).normalized
    assert dep > ind


def test_pair_order_invariance():
    ds = _dataset(50, 3)
    cfg = StatisticConfig(M=6, n_dir=16, bandwidth_c=0.5, G=3.0)
    perm = np.random.default_rng(1).permutation(ds.n)
    a = t_statistic(ds, cfg).t_value
    b = t_statistic(ds.take(perm), cfg).t_value
    assert abs(a - b) < 1e-12


def test_duplicated_pairs_finite():
    ds = _dataset(30, 4)
    r = t_statistic(ds.take(np.repeat(np.arange(ds.n), 2)), StatisticConfig(M=6, n_dir=16))
    assert np.isfinite(r.t_value) and np.isfinite(r.normalized) and r.t_value >= 0


def test_more_directions_never_decrease():
    ds = _dataset(40, 5)
    sx = projection_scores(ds.x, candidate_directions(StatisticConfig(M=6, n_dir=32))[0], 6)
    sy = projection_scores(ds.y, candidate_directions(StatisticConfig(M=6, n_dir=32))[1], 6)
    grid = EvalGrid(4.0, 10)
    assert sup_discrepancy(sx[:8], sy[:8], 0.4, grid)[0] <= sup_discrepancy(sx, sy, 0.4, grid)[0]
