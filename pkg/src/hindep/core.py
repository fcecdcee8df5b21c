"""Functional samples on a shared equispaced grid and their basis scores.

Curves are plain 1-D float arrays; a sample of ``n`` curves is an ``(n, d)``
array. Inner products use trapezoidal weights on the grid over [0, 1].
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, ParameterError


@dataclass(frozen=True)
class SampleGrid:
    num_points: int

    def __post_init__(self):
        if int(self.num_points) != self.num_points or self.num_points < 2:
            raise ParameterError(f"grid needs at least 2 points, got {self.num_points}")

    @property
    def points(self):
        return np.linspace(0.0, 1.0, self.num_points)

    @property
    def spacing(self):
        return 1.0 / (self.num_points - 1)


@dataclass(frozen=True, eq=False)
class PairedDataset:
    """``n`` paired curves ``(x[i], y[i])`` sampled on ``grid``."""

    x: np.ndarray
    y: np.ndarray
    grid: SampleGrid

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float)
        if x.ndim != 2 or y.ndim != 2:
            raise DimensionError("x and y must be 2-D arrays (samples x grid points)")
        if x.shape != y.shape:
            raise DimensionError(f"x has shape {x.shape} but y has shape {y.shape}")
        if x.shape[0] < 2:
            raise ParameterError(f"need at least 2 pairs, got {x.shape[0]}")
        if x.shape[1] != self.grid.num_points:
            raise DimensionError(
                f"curves have {x.shape[1]} values but grid has {self.grid.num_points} points")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ParameterError("curve values must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.x.shape[0]

    def take(self, indices):
        """Subset/resample of pairs by row index."""
        idx = np.asarray(indices, dtype=np.intp)
        return PairedDataset(self.x[idx], self.y[idx], self.grid)


@lru_cache(maxsize=64)
def _weights(d):
    w = np.full(d, 1.0 / (d - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    w.setflags(write=False)
    return w


def quadrature_weights(grid):
    return _weights(grid.num_points)


def riemann_inner_product(a, b):
    """Discretised L2([0,1]) inner product of two curves on the same grid."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"curves live on different grids: {a.shape} vs {b.shape}")
    if a.size < 2:
        raise DimensionError("a curve needs at least 2 grid values")
    return float(np.sum(a * b * _weights(a.size)))


def l2_norms(curves):
    """Row-wise discretised L2 norm of an ``(n, d)`` array."""
    curves = np.atleast_2d(np.asarray(curves, dtype=float))
    return np.sqrt((curves * curves) @ _weights(curves.shape[1]))


@lru_cache(maxsize=64)
def _fourier(d, M):
    t = np.linspace(0.0, 1.0, d)
    phi = np.empty((d, M))
    phi[:, 0] = 1.0
    for i in range(1, M):
        k = (i + 1) // 2
        trig = np.cos if i % 2 else np.sin
        phi[:, i] = np.sqrt(2.0) * trig(2.0 * np.pi * k * t)
    phi.setflags(write=False)
    return phi


def fourier_basis(grid, M):
    """``(d, M)`` matrix of the real Fourier basis 1, sqrt2 cos(2 pi k t), sqrt2 sin(2 pi k t), ..."""
    if M < 2 or M > grid.num_points:
        raise ParameterError(f"M must lie in [2, {grid.num_points}], got {M}")
    return _fourier(grid.num_points, int(M))


@lru_cache(maxsize=64)
def _design(d, M):
    out = _fourier(d, M) * _weights(d)[:, None]
    out.setflags(write=False)
    return out


def basis_coefficients(curves, M):
    """Coefficients of curve(s) against the first ``M`` Fourier functions.

    Accepts one curve (shape ``(d,)``) or a stack ``(n, d)``; the output has
    the matching leading shape with a trailing axis of length ``M``.
    """
    curves = np.asarray(curves, dtype=float)
    d = curves.shape[-1]
    if d < 2:
        raise DimensionError("a curve needs at least 2 grid values")
    if int(M) != M or M < 2 or M > d:
        raise ParameterError(f"M must lie in [2, {d}], got {M}")
    return curves @ _design(d, int(M))


def project(coeffs, l):
    """Projection score <l, X> from basis coefficients."""
    coeffs = np.asarray(coeffs, dtype=float)
    l = np.asarray(l, dtype=float)
    if coeffs.shape[-1] != l.shape[-1]:
        raise DimensionError(f"length mismatch: {coeffs.shape[-1]} vs {l.shape[-1]}")
    out = coeffs @ l
    return float(out) if np.ndim(out) == 0 else out
