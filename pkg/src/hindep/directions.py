"""Unit projection directions on the sphere of R^M.

Directions are rows of an ``(count, M)`` array. They come either from an
interior grid over spherical angles or from uniform sampling on the sphere.
"""
import numpy as np

from .errors import ParameterError, ResourceError

DEFAULT_GRID_CAP = 10**6


def _check_angles(theta):
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] < 1:
        raise ParameterError("need at least one angle (M >= 2)")
    polar = theta[..., :-1]
    azimuth = theta[..., -1]
    if np.any(np.abs(polar) >= np.pi / 2) or np.any(np.abs(azimuth) >= np.pi):
        raise ParameterError(
            "polar angles must lie in (-pi/2, pi/2) and the last angle in (-pi, pi)")
    if not np.all(np.isfinite(theta)):
        raise ParameterError("angles must be finite")
    return theta


def angles_to_direction(theta):
    """Map ``M - 1`` spherical angles to a unit vector in R^M.

    ``l_1 = cos t_1``, ``l_k = sin t_1 ... sin t_{k-1} cos t_k`` and the last
    coordinate is the product of all sines. Vectorised over leading axes.
    """
    theta = _check_angles(theta)
    s = np.sin(theta)
    c = np.cos(theta)
    lead = theta.shape[:-1]
    M = theta.shape[-1] + 1
    sin_prod = np.ones(lead + (M,))
    sin_prod[..., 1:] = np.cumprod(s, axis=-1)
    out = sin_prod.copy()
    out[..., :-1] *= c
    return out


def grid_angles(M, K):
    """Interior points ``lo + (j + 0.5)(hi - lo)/K`` for each angle coordinate."""
    j = (np.arange(K) + 0.5) / K
    polar = -np.pi / 2 + j * np.pi
    azimuth = -np.pi + j * 2 * np.pi
    axes = [polar] * (M - 2) + [azimuth]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def direction_grid(M, K, cap=DEFAULT_GRID_CAP):
    """All ``K**(M-1)`` grid directions, in lexicographic angle order."""
    if int(M) != M or M < 2:
        raise ParameterError(f"M must be an integer >= 2, got {M}")
    if int(K) != K or K < 1:
        raise ParameterError(f"K must be a positive integer, got {K}")
    count = int(K) ** (int(M) - 1)
    if count > cap:
        raise ResourceError(
            f"direction grid has K^(M-1) = {K}^{M - 1} = {count} points, above the cap "
            f"of {cap}; use direction_sample for this M")
    return angles_to_direction(grid_angles(int(M), int(K)))


def direction_sample(M, n_dir, seed):
    """``n_dir`` directions drawn uniformly on the unit sphere of R^M."""
    if int(M) != M or M < 2:
        raise ParameterError(f"M must be an integer >= 2, got {M}")
    if int(n_dir) != n_dir or n_dir < 1:
        raise ParameterError(f"n_dir must be a positive integer, got {n_dir}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((int(n_dir), int(M)))
    norms = np.linalg.norm(z, axis=1)
    # a zero draw has probability 0; redraw rather than divide by it
    while np.any(norms == 0):
        bad = norms == 0
        z[bad] = rng.standard_normal((int(bad.sum()), int(M)))
        norms = np.linalg.norm(z, axis=1)
    return z / norms[:, None]
