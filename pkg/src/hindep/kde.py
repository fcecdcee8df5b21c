"""Epanechnikov kernels, kernel constants, bandwidths and kernel density estimates."""
import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateDataWarning, ParameterError


class KernelId(enum.Enum):
    EPANECHNIKOV = "epanechnikov"


def epanechnikov(u):
    u = np.asarray(u, dtype=float)
    out = np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)
    return float(out) if out.ndim == 0 else out


def epanechnikov_derivative(u):
    u = np.asarray(u, dtype=float)
    out = np.where(np.abs(u) < 1.0, -1.5 * u, 0.0)
    return float(out) if out.ndim == 0 else out


def epanechnikov_autoconvolution(u):
    """(k * k)(u), supported on [-2, 2]; equals int k^2 = 3/5 at the origin."""
    a = np.abs(np.asarray(u, dtype=float))
    out = np.where(a < 2.0, 3.0 / 160.0 * (2.0 - a) ** 3 * (a * a + 6.0 * a + 4.0), 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Kernel1D:
    id: KernelId = KernelId.EPANECHNIKOV
    support_radius: float = 1.0

    def __call__(self, u):
        return epanechnikov(u)

    def derivative(self, u):
        return epanechnikov_derivative(u)


@dataclass(frozen=True)
class Kernel2D:
    """Product kernel ``k(u, v) = k1(u) k2(v)``."""

    first: Kernel1D = Kernel1D()
    second: Kernel1D = Kernel1D()

    def __call__(self, u, v):
        return self.first(u) * self.second(v)


@dataclass(frozen=True)
class KernelConstants:
    int_k: float
    int_k_sq: float
    int_m_k: float
    int_k2d_sq: float


_ANALYTIC = {KernelId.EPANECHNIKOV: (1.0, 0.6, 0.0)}


def _simpson(f, radius, panels=100_000):
    x = np.linspace(-radius, radius, 2 * panels + 1)
    return float(integrate.simpson(f(x), x=x))


def kernel_constants(kernel=Kernel1D(), quadrature=False):
    """Integrals of ``k``, ``k^2``, ``m k(m)`` and of the squared product kernel.

    Analytic for Epanechnikov; composite Simpson otherwise (or on request).
    A :class:`Kernel2D` argument uses its two factors.
    """
    if isinstance(kernel, Kernel2D):
        k1, k2 = kernel.first, kernel.second
    else:
        k1 = k2 = kernel
    consts = []
    for k in (k1, k2):
        if not quadrature and k.id in _ANALYTIC:
            consts.append(_ANALYTIC[k.id])
        else:
            r = k.support_radius
            consts.append((_simpson(k, r),
                           _simpson(lambda x: k(x) ** 2, r),
                           _simpson(lambda x: x * k(x), r)))
    (i1, sq1, mk1), (_, sq2, _) = consts
    return KernelConstants(int_k=i1, int_k_sq=sq1, int_m_k=mk1, int_k2d_sq=sq1 * sq2)


@dataclass(frozen=True)
class Bandwidth:
    c: float
    n: int

    def __post_init__(self):
        if not self.c > 0:
            raise ParameterError(f"bandwidth constant must be positive, got {self.c}")
        if self.n < 1:
            raise ParameterError(f"sample size must be positive, got {self.n}")

    @property
    def h(self):
        return bandwidth(self.c, self.n)


def bandwidth(c, n):
    """``h = c * n ** (-1/6)``."""
    if not (np.isfinite(c) and c > 0):
        raise ParameterError(f"bandwidth constant must be positive, got {c}")
    if not n >= 1:
        raise ParameterError(f"sample size must be positive, got {n}")
    return float(c) * float(n) ** (-1.0 / 6.0)


def _check_h(h):
    if not (np.isfinite(h) and h > 0):
        raise ParameterError(f"bandwidth must be positive, got {h}")


def kde_1d(data, h, s):
    """Univariate Epanechnikov density estimate ``(1/(n h)) sum k((x_i - s)/h)``.

    ``s`` may be a scalar or an array of evaluation points.
    """
    _check_h(h)
    data = np.asarray(data, dtype=float).ravel()
    if data.size == 0:
        raise ParameterError("kde_1d needs at least one data point")
    s_arr = np.asarray(s, dtype=float)
    u = (data[:, None] - s_arr.ravel()[None, :]) / h
    out = epanechnikov(u).sum(axis=0) / (data.size * h)
    return float(out[0]) if s_arr.ndim == 0 else out.reshape(s_arr.shape)


def kde_1d_derivative(data, h, s):
    """Derivative in ``s`` of :func:`kde_1d`."""
    _check_h(h)
    data = np.asarray(data, dtype=float).ravel()
    if data.size == 0:
        raise ParameterError("kde_1d_derivative needs at least one data point")
    s_arr = np.asarray(s, dtype=float)
    u = (data[:, None] - s_arr.ravel()[None, :]) / h
    out = -epanechnikov_derivative(u).sum(axis=0) / (data.size * h * h)
    return float(out[0]) if s_arr.ndim == 0 else out.reshape(s_arr.shape)


def _kde_2d(data, h, s, t, power):
    _check_h(h)
    data = np.asarray(data, dtype=float).reshape(-1, 2)
    if data.shape[0] == 0:
        raise ParameterError("kde_2d needs at least one data pair")
    s_arr, t_arr = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    ku = epanechnikov((data[:, 0:1] - s_arr.ravel()[None, :]) / h)
    kv = epanechnikov((data[:, 1:2] - t_arr.ravel()[None, :]) / h)
    out = (ku * kv).sum(axis=0) / (data.shape[0] * h ** power)
    return float(out[0]) if s_arr.ndim == 0 else out.reshape(s_arr.shape)


def kde_2d_paper_normalized(data, h, s, t):
    """Product-kernel joint estimate scaled by ``1/(n h^{3/2})``.

    This is ``sqrt(h)`` times the usual bivariate density estimate.
    """
    return _kde_2d(data, h, s, t, 1.5)


def kde_2d_standard(data, h, s, t):
    """Bivariate product-kernel density estimate ``(1/(n h^2)) sum k k``."""
    return _kde_2d(data, h, s, t, 2.0)


def lscv_scores_direct(data, hs, chunk=2048):
    """Least-squares cross-validation criterion by explicit pair sums.

    ``LSCV(h) = int fhat^2 - (2/n) sum_i fhat_{-i}(x_i)``; the first term uses
    the closed-form autoconvolution of the kernel. O(n^2) per bandwidth.
    """
    x = np.sort(np.asarray(data, dtype=float).ravel())
    hs = np.atleast_1d(np.asarray(hs, dtype=float))
    n = x.size
    conv = np.zeros(hs.size)
    loo = np.zeros(hs.size)
    for lo in range(0, n, chunk):
        diff = np.abs(x[lo:lo + chunk, None] - x[None, :])
        for k, h in enumerate(hs):
            u = diff / h
            conv[k] += epanechnikov_autoconvolution(u).sum()
            loo[k] += epanechnikov(u).sum()
    loo -= n * 0.75
    return conv / (n * n * hs) - 2.0 * loo / (n * (n - 1) * hs)


def lscv_scores(data, hs):
    """Least-squares cross-validation criterion at each bandwidth in ``hs``.

    Same quantity as :func:`lscv_scores_direct`. On sorted data the pairs
    within kernel reach of each other sit at small index offsets, so the
    sweep over offsets stops once every gap exceeds ``2 max(hs)``; cost is
    O(n w) with ``w`` the largest window occupancy.
    """
    x = np.sort(np.asarray(data, dtype=float).ravel())
    hs = np.atleast_1d(np.asarray(hs, dtype=float))
    n = x.size
    reach = 2.0 * hs.max()
    conv = np.full(hs.size, n * 0.6)
    loo = np.zeros(hs.size)
    for k in range(1, n):
        gap = x[k:] - x[:-k]
        near = gap[gap < reach]
        if near.size == 0:
            break
        u = near[None, :] / hs[:, None]
        conv += 2.0 * epanechnikov_autoconvolution(u).sum(axis=1)
        loo += 2.0 * epanechnikov(u).sum(axis=1)
    return conv / (n * n * hs) - 2.0 * loo / (n * (n - 1) * hs)


def lscv_scores_batched(samples, hs):
    """LSCV criterion for each row of ``samples`` (shape ``(A, n)``) at each ``h``.

    Returns an ``(A, len(hs))`` array; direct pair sums, meant for the
    modest ``n`` of one projected sample.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    hs = np.atleast_1d(np.asarray(hs, dtype=float))
    n = x.shape[1]
    if n < 2:
        raise ParameterError("LSCV needs at least 2 values per sample")
    diff = np.abs(x[:, :, None] - x[:, None, :])
    out = np.empty((x.shape[0], hs.size))
    for k, h in enumerate(hs):
        u = diff / h
        conv = epanechnikov_autoconvolution(u).sum(axis=(1, 2))
        loo = epanechnikov(u).sum(axis=(1, 2)) - 0.75 * n
        out[:, k] = conv / (n * n * h) - 2.0 * loo / (n * (n - 1) * h)
    return out


def default_c_candidates(data, count=16):
    """Log-spaced candidates spanning [0.1, 3] x sample standard deviation."""
    sd = float(np.std(np.asarray(data, dtype=float), ddof=1))
    if not sd > 0:
        sd = 1.0
    return sd * np.geomspace(0.1, 3.0, count)


def select_c_lscv(data, candidates, n=None):
    """Bandwidth constant minimising LSCV at ``h = c * n^(-1/6)``.

    ``n`` is the sample size entering the bandwidth rule (defaults to the
    number of data values; pooled projections pass the curve count). Ties go
    to the smaller ``c``.
    """
    data = np.asarray(data, dtype=float).ravel()
    cands = np.sort(np.asarray(candidates, dtype=float).ravel())
    if cands.size == 0:
        raise ParameterError("need at least one bandwidth candidate")
    if np.any(cands <= 0):
        raise ParameterError("bandwidth candidates must be positive")
    if data.size < 10:
        raise ParameterError(f"LSCV needs at least 10 data points, got {data.size}")
    if cands.size == 1:
        return float(cands[0])
    if np.ptp(data) == 0:
        warnings.warn("all data values are equal; using the smallest bandwidth candidate",
                      DegenerateDataWarning, stacklevel=2)
        return float(cands[0])
    n_rule = data.size if n is None else int(n)
    scores = lscv_scores(data, cands * float(n_rule) ** (-1.0 / 6.0))
    return float(cands[int(np.argmin(scores))])
