"""The sup-norm discrepancy statistic over directions and an (s, t) lattice."""
import warnings
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import kde
from .core import basis_coefficients
from .directions import DEFAULT_GRID_CAP, direction_grid, direction_sample
from .errors import DimensionError, ParameterError

NORMALIZATIONS = ("paper", "standard")

# Upper bound on entries of one block of the (direction x lattice)^2 surface.
_BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class EvalGrid:
    G: float
    L: int

    def __post_init__(self):
        if not (np.isfinite(self.G) and self.G > 0):
            raise ParameterError(f"G must be positive, got {self.G}")
        if int(self.L) != self.L or self.L < 1:
            raise ParameterError(f"L must be a positive integer, got {self.L}")

    @property
    def points(self):
        return -self.G + np.arange(self.L + 1) * (2.0 * self.G / self.L)


@dataclass(frozen=True)
class StatisticConfig:
    """Tuning of the computable statistic.

    ``grid_K`` switches the direction search from uniform sampling
    (``n_dir`` directions per element, seeded by ``direction_seed``) to the
    full spherical-angle grid. ``G=None`` picks the lattice half-width from
    the data; ``bandwidth_c=None`` selects the constant by LSCV.
    """

    M: int = 10
    n_dir: int = 256
    direction_seed: int = 0
    grid_K: int | None = None
    G: float | None = None
    L: int = 10
    bandwidth_c: float | None = None
    normalization: str = "paper"
    grid_cap: int = DEFAULT_GRID_CAP

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ParameterError(f"M must be an integer >= 2, got {self.M}")
        if self.grid_K is None and (int(self.n_dir) != self.n_dir or self.n_dir < 1):
            raise ParameterError(f"n_dir must be a positive integer, got {self.n_dir}")
        if self.grid_K is not None and (int(self.grid_K) != self.grid_K or self.grid_K < 1):
            raise ParameterError(f"K must be a positive integer, got {self.grid_K}")
        if self.G is not None and not (np.isfinite(self.G) and self.G > 0):
            raise ParameterError(f"G must be positive, got {self.G}")
        if int(self.L) != self.L or self.L < 1:
            raise ParameterError(f"L must be a positive integer, got {self.L}")
        if self.bandwidth_c is not None and not (np.isfinite(self.bandwidth_c)
                                                 and self.bandwidth_c > 0):
            raise ParameterError(f"bandwidth_c must be positive, got {self.bandwidth_c}")
        if self.normalization not in NORMALIZATIONS:
            raise ParameterError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}")

    def replace(self, **changes):
        d = asdict(self)
        d.update(changes)
        return StatisticConfig(**d)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class StatisticResult:
    t_value: float
    normalized: float
    direction_x: np.ndarray
    direction_y: np.ndarray
    s: float
    t: float
    h: float
    G: float
    bandwidth_c: float

    @property
    def argmax(self):
        return self.direction_x, self.direction_y, self.s, self.t


@lru_cache(maxsize=32)
def _cached_directions(M, n_dir, seed, K, cap):
    if K is not None:
        dirs = direction_grid(M, K, cap=cap)
        out = (dirs, dirs)
    else:
        ss = np.random.SeedSequence(seed)
        dx, dy = ss.spawn(2)
        out = (direction_sample(M, n_dir, dx), direction_sample(M, n_dir, dy))
    for d in out:
        d.setflags(write=False)
    return out


def candidate_directions(cfg):
    """The ``(dirs_x, dirs_y)`` candidate sets fixed by ``cfg``."""
    return _cached_directions(int(cfg.M), int(cfg.n_dir), int(cfg.direction_seed),
                              None if cfg.grid_K is None else int(cfg.grid_K), int(cfg.grid_cap))


def _joint_power(normalization):
    if normalization not in NORMALIZATIONS:
        raise ParameterError(
            f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    return 1.5 if normalization == "paper" else 2.0


def _kernel_matrix(scores, points, h):
    # (..., n) scores -> (..., L+1, n) kernel weights
    return kde.epanechnikov((scores[..., None, :] - points[:, None]) / h)


def discrepancy_surface(px, py, h, grid, normalization="paper"):
    """``|J(s_a, t_b) - P(s_a, t_b)|`` over the lattice, shape ``(L+1, L+1)``.

    ``J`` is the joint product-kernel sum scaled by ``1/(n h^{3/2})``
    (``"paper"``) or ``1/(n h^2)`` (``"standard"``); ``P`` is the product of the two marginal
    estimates. Marginals cost O(nL), the joint term one (L+1) x n x (L+1)
    matrix product.
    """
    px = np.asarray(px, dtype=float).ravel()
    py = np.asarray(py, dtype=float).ravel()
    if px.size != py.size:
        raise ParameterError(f"score vectors differ in length: {px.size} vs {py.size}")
    if px.size < 1:
        raise ParameterError("need at least one score pair")
    if not (np.isfinite(h) and h > 0):
        raise ParameterError(f"bandwidth must be positive, got {h}")
    n = px.size
    pts = grid.points
    kx = _kernel_matrix(px, pts, h)
    ky = _kernel_matrix(py, pts, h)
    joint = (kx @ ky.T) / (n * h ** _joint_power(normalization))
    prod = np.outer(kx.sum(axis=1), ky.sum(axis=1)) / (n * n * h * h)
    return np.abs(joint - prod)


def projection_scores(curves, dirs, M):
    """``(n_dir, n)`` projection scores of curves on each direction."""
    return dirs @ basis_coefficients(curves, M).T


def sup_discrepancy(sx, sy, h, grid, normalization="paper"):
    """Max of the discrepancy surface over all direction pairs and lattice points.

    ``sx``/``sy`` hold projection scores, shape ``(n_dir_x, n)``/``(n_dir_y, n)``.
    Returns ``(value, ix, iy, a, b)``: the value and the indices of the
    maximising x-direction, y-direction and lattice coordinates. Blocks of
    x-directions are scanned in index order, so the first maximiser wins.
    """
    sx = np.atleast_2d(np.asarray(sx, dtype=float))
    sy = np.atleast_2d(np.asarray(sy, dtype=float))
    if sx.shape[1] != sy.shape[1]:
        raise DimensionError(f"score arrays cover {sx.shape[1]} and {sy.shape[1]} samples")
    n = sx.shape[1]
    if not (np.isfinite(h) and h > 0):
        raise ParameterError(f"bandwidth must be positive, got {h}")
    pts = grid.points
    nl = pts.size
    scale_joint = 1.0 / (n * h ** _joint_power(normalization))
    scale_marg = 1.0 / (n * h)

    ky = _kernel_matrix(sy, pts, h).reshape(-1, n)          # (By*(L+1), n)
    my = ky.sum(axis=1) * scale_marg
    kyt = np.ascontiguousarray(ky.T)

    rows_per_dir = nl
    cols = ky.shape[0]
    step = max(1, _BLOCK_ENTRIES // max(1, rows_per_dir * cols))
    best = (-1.0, 0, 0, 0, 0)
    for lo in range(0, sx.shape[0], step):
        kx = _kernel_matrix(sx[lo:lo + step], pts, h).reshape(-1, n)
        mx = kx.sum(axis=1) * scale_marg
        block = kx @ kyt
        block *= scale_joint
        block -= np.outer(mx, my)
        np.abs(block, out=block)
        flat = int(np.argmax(block))
        val = float(block.flat[flat])
        if val > best[0]:
            r, c = divmod(flat, cols)
            ix, a = divmod(r, nl)
            iy, b = divmod(c, nl)
            best = (val, lo + ix, iy, a, b)
    return best


def auto_G(sx, sy, h):
    """Lattice half-width covering every projected score plus the kernel reach."""
    return float(max(np.max(np.abs(sx)), np.max(np.abs(sy)))) + h


def pooled_bandwidth_c(sx, sy, n=None, candidates=None):
    """LSCV bandwidth constant from the projected samples of x and of y.

    For each element the LSCV criterion of every direction's projected
    sample is summed over directions and minimised over candidate
    constants (ties to the smaller one); the result is the geometric mean
    of the two selections. Degenerate (constant) scores fall back to the
    smallest candidate.
    """
    picks = []
    for scores in (np.atleast_2d(sx), np.atleast_2d(sy)):
        m = scores.shape[1] if n is None else int(n)
        cands = kde.default_c_candidates(scores) if candidates is None else candidates
        cands = np.sort(np.asarray(cands, dtype=float).ravel())
        if cands.size == 0 or np.any(cands <= 0):
            raise ParameterError("bandwidth candidates must be a nonempty set of positive values")
        if cands.size == 1 or np.ptp(scores) == 0:
            if cands.size > 1:
                warnings.warn("projected scores are constant; using the smallest candidate",
                              kde.DegenerateDataWarning, stacklevel=2)
            picks.append(float(cands[0]))
            continue
        crit = kde.lscv_scores_batched(scores, cands * float(m) ** (-1.0 / 6.0)).sum(axis=0)
        picks.append(float(cands[int(np.argmin(crit))]))
    return float(np.sqrt(picks[0] * picks[1]))


def t_statistic(ds, cfg):
    """Statistic ``T_n^{G,L}`` of a paired dataset under ``cfg``."""
    dirs_x, dirs_y = candidate_directions(cfg)
    if dirs_x.shape[1] != cfg.M:
        raise DimensionError("direction dimension does not match M")
    sx = projection_scores(ds.x, dirs_x, cfg.M)
    sy = projection_scores(ds.y, dirs_y, cfg.M)
    n = ds.n
    c = cfg.bandwidth_c
    if c is None:
        c = pooled_bandwidth_c(sx, sy, n)
    h = kde.bandwidth(c, n)
    G = auto_G(sx, sy, h) if cfg.G is None else float(cfg.G)
    grid = EvalGrid(G, cfg.L)
    val, ix, iy, a, b = sup_discrepancy(sx, sy, h, grid, cfg.normalization)
    pts = grid.points
    return StatisticResult(
        t_value=val,
        normalized=float(np.sqrt(n * h) * val),
        direction_x=dirs_x[ix].copy(),
        direction_y=dirs_y[iy].copy(),
        s=float(pts[a]),
        t=float(pts[b]),
        h=h,
        G=G,
        bandwidth_c=float(c),
    )
