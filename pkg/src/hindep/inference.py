"""Null calibration, critical values, power and resampling procedures."""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kde
from ._parallel import ordered_map
from .core import PairedDataset, SampleGrid
from .errors import ParameterError
from .processes import DEPENDENT_EXAMPLES, EXAMPLES, NULL_EXAMPLES, example_pair, stream
from .statistic import (EvalGrid, candidate_directions, pooled_bandwidth_c,
                        projection_scores, t_statistic)

# stream families under one master seed
CALIBRATION, TEST, PILOT, RESAMPLE, SUP_DRAWS, MIX = range(1, 7)

_SUP_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class NullModel:
    """Independent Gaussian field ``Z_{s,t}`` on the lattice."""

    s_points: np.ndarray
    t_points: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    c_limit: float
    f1: np.ndarray
    f2: np.ndarray
    f12: np.ndarray
    h: float = float("nan")

    def __post_init__(self):
        if np.size(self.mean) == 0:
            raise ParameterError("null model lattice is empty")
        if np.any(np.asarray(self.var) < 0):
            raise ParameterError("null model variances must be nonnegative")


@dataclass(frozen=True, eq=False)
class SupNullDistribution:
    samples: np.ndarray
    reps: int


@dataclass
class TestReport:
    t_value: float
    normalized: float
    critical_value: float
    p_value: float
    method: str
    alpha: float
    seed: int
    config: dict = field(default_factory=dict)
    bandwidth_c: float = float("nan")
    h: float = float("nan")
    G: float = float("nan")

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def limit_moments(f1, f2, f12, df1, df2, c_limit, consts):
    """Mean and variance of each ``Z_{s,t}`` from plug-in densities.

    ``f1``/``df1`` live on the s-axis, ``f2``/``df2`` on the t-axis, ``f12``
    on the lattice.
    """
    f1 = np.asarray(f1, dtype=float)[:, None]
    df1 = np.asarray(df1, dtype=float)[:, None]
    f2 = np.asarray(f2, dtype=float)[None, :]
    df2 = np.asarray(df2, dtype=float)[None, :]
    mean = -np.sqrt(c_limit) * (f1 * df2 * consts.int_m_k + f2 * df1 * consts.int_m_k)
    var = (np.asarray(f12, dtype=float) * consts.int_k2d_sq
           + f1 ** 2 * f2 * consts.int_k_sq + f1 * f2 ** 2 * consts.int_k_sq)
    return mean, var


def fit_null_model(reference, cfg, directions=None, joint="product"):
    """Plug-in Gaussian field for ``sqrt(n h) T`` at one direction pair.

    Without ``directions`` the maximising pair of the statistic on
    ``reference`` is used. The joint density is the product of the marginal
    estimates unless ``joint="kde"``.
    """
    if joint not in ("product", "kde"):
        raise ParameterError(f"joint must be 'product' or 'kde', got {joint!r}")
    c = cfg.bandwidth_c
    G = cfg.G
    if directions is None or c is None or G is None:
        res = t_statistic(reference, cfg)
        c = res.bandwidth_c if c is None else c
        G = res.G if G is None else G
        if directions is None:
            directions = (res.direction_x, res.direction_y)
    lx, ly = (np.asarray(d, dtype=float) for d in directions)
    n = reference.n
    h = kde.bandwidth(c, n)
    pts = EvalGrid(G, cfg.L).points
    px = projection_scores(reference.x, lx[None, :], cfg.M)[0]
    py = projection_scores(reference.y, ly[None, :], cfg.M)[0]
    f1 = kde.kde_1d(px, h, pts)
    f2 = kde.kde_1d(py, h, pts)
    if joint == "product":
        f12 = np.outer(f1, f2)
    else:
        ss, tt = np.meshgrid(pts, pts, indexing="ij")
        f12 = kde.kde_2d_standard(np.column_stack([px, py]), h, ss, tt)
    df1 = kde.kde_1d_derivative(px, h, pts)
    df2 = kde.kde_1d_derivative(py, h, pts)
    c_limit = n * h * h
    mean, var = limit_moments(f1, f2, f12, df1, df2, c_limit, kde.kernel_constants(kde.Kernel2D()))
    return NullModel(s_points=pts, t_points=pts.copy(), mean=mean, var=var,
                     c_limit=c_limit, f1=f1, f2=f2, f12=f12, h=h)


def sample_sup_distribution(nm, reps, seed, threads=None):
    """Draws of ``max |Z_{s,t}|`` over the lattice, sorted ascending."""
    if int(reps) != reps or reps < 100:
        raise ParameterError(f"reps must be an integer >= 100, got {reps}")
    mean = np.asarray(nm.mean, dtype=float).ravel()
    sd = np.sqrt(np.asarray(nm.var, dtype=float).ravel())
    rows = max(1, _SUP_CHUNK // mean.size)
    starts = list(range(0, int(reps), rows))

    def chunk(k):
        lo = starts[k]
        m = min(rows, int(reps) - lo)
        z = stream(seed, SUP_DRAWS, k).standard_normal((m, mean.size))
        return np.max(np.abs(mean + sd * z), axis=1)

    samples = np.sort(np.concatenate(ordered_map(chunk, range(len(starts)), threads)))
    return SupNullDistribution(samples=samples, reps=int(reps))


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")


def upper_quantile(values, alpha):
    """Smallest value whose 1-based rank is at least ``ceil((1 - alpha) m)``."""
    _check_alpha(alpha)
    v = np.sort(np.asarray(values, dtype=float))
    # round away float noise such as (1 - 0.05) * 1000 = 950.0000000000001
    rank = max(1, math.ceil(round((1.0 - alpha) * v.size, 9)))
    return float(v[min(rank, v.size) - 1])


def critical_value(snd, alpha):
    """Empirical upper-``alpha`` critical value of the sup distribution."""
    return upper_quantile(snd.samples, alpha)


def asymptotic_power(snd, c_alpha, lam):
    """``P(sup|Z| + lam > c_alpha)`` under the local alternative of size ``lam``."""
    if not lam >= 0:
        raise ParameterError(f"lambda must be nonnegative, got {lam}")
    return float(np.mean(snd.samples + lam > c_alpha))


@dataclass
class AsymptoticPowerCurve:
    example_id: int
    lambdas: np.ndarray
    power: np.ndarray
    critical_value: float
    bandwidth_c: float


def asymptotic_power_curve(example_id, lambdas, alpha, n, grid, cfg, reps, seed, threads=None):
    """Power over a lambda grid for one example's plug-in limit model.

    The field is fitted on a sample of size ``n`` from the example with the
    joint density replaced by the product of marginals, so the curve starts
    at ``alpha``.
    """
    ds = example_pair(example_id, n, grid, seed, purpose=PILOT)
    cfg = resolve_bandwidth(cfg, ds)
    nm = fit_null_model(ds, cfg)
    snd = sample_sup_distribution(nm, reps, seed, threads)
    c_alpha = critical_value(snd, alpha)
    lams = np.asarray(lambdas, dtype=float)
    power = np.array([asymptotic_power(snd, c_alpha, lam) for lam in lams])
    return AsymptoticPowerCurve(example_id, lams, power, c_alpha, cfg.bandwidth_c)


def resolve_bandwidth(cfg, ds):
    """``cfg`` with ``bandwidth_c`` fixed, selecting it by LSCV on ``ds`` if unset."""
    if cfg.bandwidth_c is not None:
        return cfg
    dirs_x, dirs_y = candidate_directions(cfg)
    sx = projection_scores(ds.x, dirs_x, cfg.M)
    sy = projection_scores(ds.y, dirs_y, cfg.M)
    return cfg.replace(bandwidth_c=pooled_bandwidth_c(sx, sy, ds.n))


def _uniform_resample(rng, n):
    return rng.integers(0, n, size=n)


def bootstrap_pvalue(ds, B, cfg, seed, alpha=0.05, method="bootstrap", threads=None,
                     resample_indices=None):
    """Resampling p-value ``(1/B) sum 1(t_j > t_0)``.

    ``method="bootstrap"`` resamples pairs jointly with replacement.
    ``method="permutation"`` instead permutes y against x, which enforces
    independence in every replicate. The bandwidth constant is fixed on the
    original data before resampling. ``resample_indices(rng, n)`` overrides
    the bootstrap index draw.
    """
    if int(B) != B or B < 1:
        raise ParameterError(f"B must be a positive integer, got {B}")
    if method not in ("bootstrap", "permutation"):
        raise ParameterError(f"unknown resampling method {method!r}")
    _check_alpha(alpha)
    cfg = resolve_bandwidth(cfg, ds)
    r0 = t_statistic(ds, cfg)
    draw = resample_indices or _uniform_resample

    def one(j):
        rng = stream(seed, RESAMPLE, j)
        if method == "bootstrap":
            sample = ds.take(draw(rng, ds.n))
        else:
            sample = PairedDataset(ds.x, ds.y[rng.permutation(ds.n)], ds.grid)
        r = t_statistic(sample, cfg)
        return r.t_value, r.normalized

    stats = np.array(ordered_map(one, range(int(B)), threads))
    p = float(np.mean(stats[:, 0] > r0.t_value))
    return TestReport(t_value=r0.t_value, normalized=r0.normalized,
                      critical_value=upper_quantile(stats[:, 1], alpha), p_value=p,
                      method=method, alpha=alpha, seed=seed, config=cfg.to_dict(),
                      bandwidth_c=r0.bandwidth_c, h=r0.h, G=r0.G)


def asymptotic_test(ds, cfg, alpha, reps, seed, threads=None):
    """Test calibrated by the plug-in limit field fitted on ``ds`` itself."""
    _check_alpha(alpha)
    cfg = resolve_bandwidth(cfg, ds)
    r0 = t_statistic(ds, cfg)
    nm = fit_null_model(ds, cfg.replace(G=r0.G), directions=(r0.direction_x, r0.direction_y))
    snd = sample_sup_distribution(nm, reps, seed, threads)
    p = float(np.mean(snd.samples >= r0.normalized))
    return TestReport(t_value=r0.t_value, normalized=r0.normalized,
                      critical_value=critical_value(snd, alpha), p_value=p,
                      method="asymptotic", alpha=alpha, seed=seed, config=cfg.to_dict(),
                      bandwidth_c=r0.bandwidth_c, h=r0.h, G=r0.G)


@dataclass
class MCResult:
    rate: float
    critical_value: float
    bandwidth_c: float
    null_statistics: np.ndarray
    test_statistics: np.ndarray


def _statistics(example_id, n, grid, cfg, seed, purpose, reps, threads):
    def one(i):
        ds = example_pair(example_id, n, grid, seed, replicate=i, purpose=purpose)
        return t_statistic(ds, cfg).normalized
    return np.array(ordered_map(one, range(int(reps)), threads))


def calibrate(n, grid, alpha, cfg, seed, calib_reps=1000, threads=None):
    """Critical value of ``sqrt(n h) T`` from independent-Brownian replicates.

    Returns ``(critical_value, cfg_with_fixed_bandwidth, statistics)``.
    ``alpha == 0`` yields an infinite critical value.
    """
    if int(calib_reps) != calib_reps or calib_reps < 1:
        raise ParameterError(f"calib_reps must be a positive integer, got {calib_reps}")
    cfg = resolve_bandwidth(cfg, example_pair(4, n, grid, seed, purpose=PILOT))
    stats = _statistics(4, n, grid, cfg, seed, CALIBRATION, calib_reps, threads)
    c_alpha = math.inf if alpha == 0 else upper_quantile(stats, alpha)
    return c_alpha, cfg, stats


def mc_experiment(example_id, n, alpha, reps, cfg, seed, grid=SampleGrid(101),
                  calib_reps=1000, threads=None):
    """Rejection rate over ``reps`` fresh datasets from ``example_id``."""
    if example_id not in EXAMPLES:
        raise ParameterError(f"unknown example id {example_id!r}")
    if int(reps) != reps or reps < 100:
        raise ParameterError(f"reps must be an integer >= 100, got {reps}")
    if not 0 <= alpha < 1:
        raise ParameterError(f"alpha must lie in [0, 1), got {alpha}")
    c_alpha, cfg, null_stats = calibrate(n, grid, alpha, cfg, seed, calib_reps, threads)
    stats = _statistics(example_id, n, grid, cfg, seed, TEST, reps, threads)
    return MCResult(rate=float(np.mean(stats > c_alpha)), critical_value=c_alpha,
                    bandwidth_c=cfg.bandwidth_c, null_statistics=null_stats,
                    test_statistics=stats)


def mc_level(example_id, n, alpha, reps, cfg, seed, **kwargs):
    """Estimated size on one of the independent examples (4, 5, 6)."""
    if example_id not in NULL_EXAMPLES:
        raise ParameterError(f"level examples are {NULL_EXAMPLES}, got {example_id!r}")
    return mc_experiment(example_id, n, alpha, reps, cfg, seed, **kwargs).rate


def mc_power(example_id, n, alpha, reps, cfg, seed, **kwargs):
    """Estimated power on one of the dependent examples."""
    if example_id not in DEPENDENT_EXAMPLES:
        raise ParameterError(f"power examples are {DEPENDENT_EXAMPLES}, got {example_id!r}")
    return mc_experiment(example_id, n, alpha, reps, cfg, seed, **kwargs).rate


@dataclass
class MixSplitResult:
    size: float
    power: float
    critical_value: float
    dropped: int | None
    bandwidth_c: float


def mix_split_size_power(ds, alpha, M1, M2, seed, cfg, n_calib=500, threads=None):
    """Size and power from pooled-and-split curves and pair bootstraps.

    All ``2n`` curves are pooled and shuffled; the two halves are
    independent by construction. Independent bootstraps of the halves give
    the critical value (``n_calib`` draws) and the size (``M1`` draws);
    joint bootstraps of the original pairs give the power (``M2`` draws).
    """
    for name, v in (("M1", M1), ("M2", M2), ("n_calib", n_calib)):
        if int(v) != v or v < 100:
            raise ParameterError(f"{name} must be an integer >= 100, got {v}")
    _check_alpha(alpha)
    cfg = resolve_bandwidth(cfg, ds)
    rng = stream(seed, MIX, 0)
    pooled = np.vstack([ds.x, ds.y])[rng.permutation(2 * ds.n)]
    dropped = None
    if pooled.shape[0] % 2:
        dropped = int(rng.integers(pooled.shape[0]))
        pooled = np.delete(pooled, dropped, axis=0)
    half = pooled.shape[0] // 2
    z1, z2 = pooled[:half], pooled[half:]

    def split_stat(j):
        r = stream(seed, MIX, 1, j)
        i1 = r.integers(0, half, size=half)
        i2 = r.integers(0, half, size=half)
        return t_statistic(PairedDataset(z1[i1], z2[i2], ds.grid), cfg).normalized

    def pair_stat(j):
        r = stream(seed, MIX, 2, j)
        return t_statistic(ds.take(r.integers(0, ds.n, size=ds.n)), cfg).normalized

    calib = np.array(ordered_map(split_stat, range(n_calib), threads))
    c_alpha = upper_quantile(calib, alpha)
    size_stats = np.array(ordered_map(split_stat, range(n_calib, n_calib + M1), threads))
    power_stats = np.array(ordered_map(pair_stat, range(M2), threads))
    return MixSplitResult(size=float(np.mean(size_stats > c_alpha)),
                          power=float(np.mean(power_stats > c_alpha)),
                          critical_value=c_alpha, dropped=dropped,
                          bandwidth_c=cfg.bandwidth_c)
