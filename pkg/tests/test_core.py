import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hindep.core import (PairedDataset, SampleGrid, basis_coefficients, fourier_basis, l2_norms,
                         project, quadrature_weights, riemann_inner_product)
from hindep.errors import DimensionError, ParameterError


def test_inner_product_constant_and_zero():
    for d in (2, 7, 101):
        one = np.ones(d)
        assert riemann_inner_product(one, one) == pytest.approx(1.0, abs=1e-12)
        assert riemann_inner_product(one, np.zeros(d)) == 0.0


def test_inner_product_t_squared():
    t = SampleGrid(101).points
    assert abs(riemann_inner_product(t, t) - 1 / 3) < 1e-3


def test_inner_product_mismatch():
    with pytest.raises(DimensionError):
        riemann_inner_product(np.ones(3), np.ones(4))


def test_weights_sum_to_one():
    assert quadrature_weights(SampleGrid(11)).sum() == pytest.approx(1.0)


def test_basis_orthonormal_on_fine_grid():
    phi = fourier_basis(SampleGrid(2001), 7)
    w = quadrature_weights(SampleGrid(2001))
    gram = (phi.T * w) @ phi
    assert np.max(np.abs(gram - np.eye(7))) < 1e-3


def test_coefficients_of_constant_and_zero():
    c = basis_coefficients(np.ones(101), 5)
    assert np.allclose(c, [1, 0, 0, 0, 0], atol=1e-3)
    assert np.all(basis_coefficients(np.zeros(101), 5) == 0)


def test_coefficients_of_cosine():
    t = SampleGrid(201).points
    c = basis_coefficients(np.sqrt(2) * np.cos(2 * np.pi * t), 3)
    assert np.allclose(c, [0, 1, 0], atol=1e-2)


def test_coefficients_batch_matches_rows():
    rng = np.random.default_rng(0)
    curves = rng.standard_normal((4, 31))
    batch = basis_coefficients(curves, 6)
    for i in range(4):
        assert np.allclose(batch[i], basis_coefficients(curves[i], 6))


@pytest.mark.parametrize("M", [0, 1, 102])
def test_coefficients_bad_M(M):
    with pytest.raises(ParameterError):
        basis_coefficients(np.ones(101), M)


def test_project():
    coeffs = np.array([1.0, 2.0])
    assert project(coeffs, [1.0, 0.0]) == 1.0
    assert project(coeffs, [0.0, 0.0]) == 0.0
    assert project(coeffs, [0.6, 0.8]) == pytest.approx(2.2, abs=1e-15)
    with pytest.raises(DimensionError):
        project(coeffs, [1.0, 0.0, 0.0])


def test_dataset_validation():
    g = SampleGrid(3)
    with pytest.raises(DimensionError):
        PairedDataset(np.ones((2, 3)), np.ones((3, 3)), g)
    with pytest.raises(ParameterError):
        PairedDataset(np.ones((1, 3)), np.ones((1, 3)), g)
    with pytest.raises(ParameterError):
        PairedDataset(np.full((2, 3), np.nan), np.ones((2, 3)), g)
    ds = PairedDataset(np.arange(6.0).reshape(2, 3), np.ones((2, 3)), g)
    assert ds.n == 2 and not ds.x.flags.writeable
    assert np.array_equal(ds.take([1, 1]).x, [[3, 4, 5], [3, 4, 5]])


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 60), st.floats(-5, 5), st.floats(-5, 5))
def test_inner_product_bilinear(d, a, b):
    rng = np.random.default_rng(d)
    u, v, w = rng.standard_normal((3, d))
    lhs = riemann_inner_product(a * u + b * v, w)
    rhs = a * riemann_inner_product(u, w) + b * riemann_inner_product(v, w)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_norms_match_inner_product():
    rng = np.random.default_rng(1)
    c = rng.standard_normal((3, 17))
    assert np.allclose(l2_norms(c) ** 2, [riemann_inner_product(r, r) for r in c])
