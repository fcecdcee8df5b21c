"""Gaussian / fractional Brownian / t-process simulators and the paired examples.

Random streams are keyed: every draw comes from
``SeedSequence(seed, spawn_key=(purpose, replicate, role))`` so that X and Y,
and distinct replicates, never share a stream.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import PairedDataset, SampleGrid, l2_norms
from .errors import NumericalError, ParameterError

X_ROLE, Y_ROLE, AUX_ROLE = 0, 1, 2


@dataclass(frozen=True)
class CovarianceSpec:
    """``kind`` is ``"brownian"``, ``"fbm"`` (needs ``hurst``) or ``"t_process"`` (needs ``df``)."""

    kind: str
    grid: SampleGrid
    hurst: float = 0.5
    df: int = 3

    def __post_init__(self):
        if self.kind not in ("brownian", "fbm", "t_process"):
            raise ParameterError(f"unknown process kind {self.kind!r}")
        if self.kind == "fbm" and not 0 < self.hurst < 1:
            raise ParameterError(f"Hurst index must lie in (0, 1), got {self.hurst}")
        if self.kind == "t_process" and (int(self.df) != self.df or self.df < 1):
            raise ParameterError(f"degrees of freedom must be a positive integer, got {self.df}")


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    lower: np.ndarray
    jitter: float


def covariance_matrix(spec):
    """Covariance of the underlying Gaussian process on the spec's grid.

    The t-process is a scale mixture of Brownian motion, so its Gaussian
    part has the Brownian covariance.
    """
    t = spec.grid.points
    s_, t_ = np.meshgrid(t, t, indexing="ij")
    if spec.kind == "fbm":
        two_h = 2.0 * spec.hurst
        return 0.5 * (s_ ** two_h + t_ ** two_h - np.abs(s_ - t_) ** two_h)
    return np.minimum(s_, t_)


def cholesky(a, base=1e-12, max_rel=1e-8):
    """Lower Cholesky factor of ``a + eps I`` with the smallest eps that works.

    ``eps`` starts at ``base * trace(a)/d`` and doubles up to
    ``max_rel * trace(a)/d``; zero jitter is tried first.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"need a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ParameterError("matrix is not symmetric")
    d = a.shape[0]
    scale = np.trace(a) / d if d else 0.0
    if scale <= 0:
        scale = 1.0
    eps = 0.0
    nxt = base * scale
    while True:
        try:
            lower = np.linalg.cholesky(a + eps * np.eye(d))
            return CholeskyFactor(lower=lower, jitter=eps)
        except np.linalg.LinAlgError:
            if nxt > max_rel * scale * (1 + 1e-9):
                raise NumericalError(
                    f"Cholesky failed even with jitter {eps:.3g}") from None
            eps, nxt = nxt, nxt * 2.0


@lru_cache(maxsize=32)
def _factor(kind, d, hurst):
    spec = CovarianceSpec(kind, SampleGrid(d), hurst=hurst)
    f = cholesky(covariance_matrix(spec))
    f.lower.setflags(write=False)
    return f


def process_factor(kind, grid, hurst=0.5):
    """Cached Cholesky factor for a Brownian or fBm covariance on ``grid``."""
    kind = "brownian" if kind == "t_process" else kind
    return _factor(kind, grid.num_points, float(hurst) if kind == "fbm" else 0.5)


def stream(seed, *key):
    """Independent generator for ``(seed, key...)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def sample_gaussian_path(factor, seed):
    """One path ``L z`` with ``z`` standard normal."""
    lower = factor.lower if isinstance(factor, CholeskyFactor) else np.asarray(factor, dtype=float)
    z = np.random.default_rng(seed).standard_normal(lower.shape[0])
    return lower @ z


def sample_gaussian_paths(factor, n, rng):
    """``(n, d)`` array of independent paths."""
    lower = factor.lower if isinstance(factor, CholeskyFactor) else np.asarray(factor, dtype=float)
    z = rng.standard_normal((n, lower.shape[0]))
    return z @ lower.T


def sample_t_paths(grid, n, df, rng):
    """Brownian paths divided by ``sqrt(N/df)``, one chi-square ``N`` per path."""
    b = sample_gaussian_paths(process_factor("brownian", grid), n, rng)
    chi = rng.chisquare(df, size=n)
    return b / np.sqrt(chi / df)[:, None]


def _exp_ramp(n, grid, rng):
    u = rng.uniform(0.0, 1.0, size=n)
    return u[:, None] * np.exp(grid.points)[None, :]


EXAMPLES = {
    1: "X = U e^t, Y = ||X|| B with B Brownian",
    2: "X = U e^t, Y = ||X|| B with B fBm(H=0.25)",
    3: "X = U e^t, Y = ||X|| B with B fBm(H=0.75)",
    4: "X, Y independent Brownian motions",
    5: "X, Y independent fBm(H=0.25)",
    6: "X, Y independent fBm(H=0.75)",
    7: "X Brownian, Y = X^2",
    8: "X Brownian, Y = exp(X)",
    9: "X t-process (3 df), Y = X^2",
    10: "X t-process (3 df), Y = exp(X)",
}
NULL_EXAMPLES = (4, 5, 6)
DEPENDENT_EXAMPLES = (1, 2, 3, 7, 8, 9, 10)

_HURST = {1: 0.5, 2: 0.25, 3: 0.75, 4: 0.5, 5: 0.25, 6: 0.75}


def example_pair(example_id, n, grid, seed, replicate=0, purpose=0):
    """Draw ``n`` pairs from one of the ten example models.

    ``purpose`` and ``replicate`` select the stream family, so calibration
    and test replicates drawn from the same master seed stay independent.
    """
    if example_id not in EXAMPLES:
        raise ParameterError(f"unknown example id {example_id!r}; expected 1..10")
    if int(n) != n or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n}")
    n = int(n)
    rx = stream(seed, purpose, replicate, X_ROLE)
    ry = stream(seed, purpose, replicate, Y_ROLE)
    if example_id in (1, 2, 3):
        x = _exp_ramp(n, grid, rx)
        h = _HURST[example_id]
        b = sample_gaussian_paths(process_factor("fbm" if h != 0.5 else "brownian", grid, h),
                                  n, ry)
        y = l2_norms(x)[:, None] * b
    elif example_id in (4, 5, 6):
        h = _HURST[example_id]
        factor = process_factor("fbm" if h != 0.5 else "brownian", grid, h)
        x = sample_gaussian_paths(factor, n, rx)
        y = sample_gaussian_paths(factor, n, ry)
    else:
        if example_id in (7, 8):
            x = sample_gaussian_paths(process_factor("brownian", grid), n, rx)
        else:
            x = sample_t_paths(grid, n, 3, rx)
        y = x ** 2 if example_id in (7, 9) else np.exp(x)
    return PairedDataset(x, y, grid)


def independent_brownian_pair(n, grid, seed, replicate=0, purpose=0):
    """Calibration data: two independent standard Brownian samples."""
    return example_pair(4, n, grid, seed, replicate, purpose)
