import numpy as np
import pytest

from hindep.core import SampleGrid, l2_norms
from hindep.errors import NumericalError, ParameterError
from hindep.processes import (CovarianceSpec, cholesky, covariance_matrix, example_pair,
                              process_factor, sample_gaussian_path, sample_gaussian_paths,
                              sample_t_paths, stream)


def test_fbm_half_is_brownian():
    g = SampleGrid(101)
    a = covariance_matrix(CovarianceSpec("fbm", g, hurst=0.5))
    b = covariance_matrix(CovarianceSpec("brownian", g))
    assert np.max(np.abs(a - b)) < 1e-12


def test_fbm_quarter_formula():
    g = SampleGrid(5)
    c = covariance_matrix(CovarianceSpec("fbm", g, hurst=0.25))
    s, t = 0.25, 0.75
    assert c[1, 3] == pytest.approx(0.5 * (s ** 0.5 + t ** 0.5 - 0.5 ** 0.5))


def test_cholesky_examples():
    assert np.array_equal(cholesky(np.eye(3)).lower, np.eye(3))
    f = cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
    assert np.allclose(f.lower, [[2, 0], [1, np.sqrt(2)]], atol=1e-15)
    with pytest.raises(NumericalError):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ParameterError):
        cholesky(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("kind,h", [("brownian", 0.5), ("fbm", 0.25), ("fbm", 0.75)])
def test_cholesky_reconstruction(kind, h):
    g = SampleGrid(101)
    a = covariance_matrix(CovarianceSpec(kind, g, hurst=h))
    f = cholesky(a)
    assert np.max(np.abs(f.lower @ f.lower.T - a)) < 1e-8


def test_zero_factor_gives_zero_path():
    assert np.all(sample_gaussian_path(np.zeros((4, 4)), 0) == 0)


def test_brownian_endpoint_variance():
    x = sample_gaussian_paths(process_factor("brownian", SampleGrid(101)), 10_000, stream(0, 9))
    assert abs(x[:, -1].var() - 1) < 0.05
    assert np.all(np.abs(x[:, 0]) < 1e-5)  # jitter only


def test_t_paths_heavier_tails():
    g = SampleGrid(21)
    t = sample_t_paths(g, 20_000, 3, stream(1, 0))
    kurt = np.mean(t[:, -1] ** 4) / np.mean(t[:, -1] ** 2) ** 2
    assert kurt > 4  # Gaussian is 3


def test_example4_projection_uncorrelated():
    ds = example_pair(4, 2000, SampleGrid(101), 11)
    l = np.ones(101)
    assert abs(np.corrcoef(ds.x @ l, ds.y @ l)[0, 1]) < 0.05


def test_example1_construction():
    g = SampleGrid(101)
    ds = example_pair(1, 10_000, g, 3)
    b = ds.y / l2_norms(ds.x)[:, None]
    assert abs(b[:, -1].var() - 1) < 0.05
    ratio = ds.x[:, 60] / ds.x[:, 20]
    assert np.allclose(ratio, np.exp(g.points[60] - g.points[20]), rtol=1e-12)


@pytest.mark.parametrize("eid", [7, 9])
def test_squared_examples_exact(eid):
    ds = example_pair(eid, 5, SampleGrid(101), 1)
    assert np.array_equal(ds.y, ds.x ** 2)


@pytest.mark.parametrize("eid", [8, 10])
def test_exp_examples_exact(eid):
    ds = example_pair(eid, 5, SampleGrid(11), 1)
    assert np.array_equal(ds.y, np.exp(ds.x))


def test_example_determinism_and_streams():
    g = SampleGrid(11)
    a = example_pair(5, 7, g, 42)
    b = example_pair(5, 7, g, 42)
    c = example_pair(5, 7, g, 42, replicate=1)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    assert not np.array_equal(a.x, c.x)
    assert not np.array_equal(a.x, a.y)


def test_unknown_example():
    with pytest.raises(ParameterError):
        example_pair(11, 5, SampleGrid(11), 0)
    with pytest.raises(ParameterError):
        CovarianceSpec("fbm", SampleGrid(3), hurst=1.5)
