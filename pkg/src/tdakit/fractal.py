"""Fractal dimension from persistent homology and from box counting.

The persistent-homology estimate fits the growth of the alpha-weighted
interval sum ``E(n) = sum |I|**alpha`` against the sample size ``n``:
with slope ``beta`` of ``log E`` versus ``log n``, the dimension is
``alpha / (1 - beta)``.  For dimension 0 and ``alpha = 1`` the sum is the
length of the Euclidean minimal spanning tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats
from scipy.spatial import Delaunay, QhullError

from . import _reduction as kern
from .dynsys import DEFAULT_INITIAL, MapSpec, generate_henon, integrate
from .errors import DegenerateFitError, EmptyInputError, ValidationError
from .filtration import _as_distance_matrix
from .geometry import PointCloud
from .persistence import PersistenceDiagram, persistent_diagram

DEFAULT_ALPHA = 1.0
DEFAULT_TRIALS = 5
DEFAULT_N_SIZES = 8

#: Above this many points, dimension-0 sums skip the dense distance matrix.
DENSE_MST_LIMIT = 3000

PointSampler = Callable[[int, np.random.Generator], PointCloud]


@dataclass(frozen=True)
class MstEdgeSet:
    edges: tuple[tuple[int, int, float], ...]
    total_length: float

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e[2] for e in self.edges], dtype=float)

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class DimensionEstimate:
    dimension: float
    uncertainty: float
    alpha: float
    sample_sizes: tuple[int, ...]
    log_sums: tuple[float, ...]
    beta: float
    beta_stderr: float = 0.0
    hom_dim: int = 0

    def fit_rows(self):
        """Rows ``(n, log_n, log_E)`` for plotting the log-log fit."""
        return [(n, math.log(n), le) for n, le in zip(self.sample_sizes, self.log_sums)]

    def summary(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "dimension": self.dimension,
            "uncertainty": self.uncertainty,
        }


@dataclass(frozen=True)
class BoxCountEstimate:
    dimension: float
    uncertainty: float
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    degenerate: bool = False


# ------------------------------------------------------------ MST

def _mst_from_candidates(n: int, i: np.ndarray, j: np.ndarray, w: np.ndarray) -> MstEdgeSet:
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    order = np.lexsort((hi, lo, w))  # length, then lexicographic edge
    verts = np.ascontiguousarray(np.column_stack([lo, hi]), dtype=np.int64)
    merged = kern.kruskal(n, verts, order.astype(np.int64))
    edges = tuple((int(lo[e]), int(hi[e]), float(w[e])) for e in merged)
    return MstEdgeSet(edges, float(sum(e[2] for e in edges)))


def mst_edges(m) -> MstEdgeSet:
    """Kruskal over all pairs of a distance matrix; ties broken lexicographically."""
    m = _as_distance_matrix(m)
    n = m.n
    if n == 0:
        raise EmptyInputError("MST of an empty point set")
    i, j = np.triu_indices(n, 1)
    return _mst_from_candidates(n, i, j, m.entries[i, j])


def mst_from_points(cloud: PointCloud) -> MstEdgeSet:
    """Euclidean MST without a dense distance matrix.

    In 2-D and 3-D the MST is a subgraph of the Delaunay triangulation, so
    union-find runs over Delaunay edges only.  Other dimensions, and inputs
    Qhull rejects, fall back to an O(n^2)-time, O(n)-memory Prim sweep.
    """
    x = np.ascontiguousarray(cloud.points, dtype=np.float64)
    n = len(x)
    if n == 0:
        raise EmptyInputError("MST of an empty point set")
    if n == 1:
        return MstEdgeSet((), 0.0)
    if cloud.dim in (2, 3) and n > cloud.dim + 1:
        try:
            tri = Delaunay(x)
        except QhullError:
            tri = None
        if tri is not None and not len(tri.coplanar):
            s = tri.simplices
            pairs = np.concatenate(
                [s[:, [a, b]] for a in range(s.shape[1]) for b in range(a + 1, s.shape[1])]
            )
            pairs = np.unique(np.sort(pairs, axis=1), axis=0)
            w = np.sqrt(((x[pairs[:, 0]] - x[pairs[:, 1]]) ** 2).sum(axis=1))
            mst = _mst_from_candidates(n, pairs[:, 0], pairs[:, 1], w)
            if len(mst) == n - 1:
                return mst
    par, child, ln = kern.prim_mst_points(x)
    edges = tuple(
        (int(min(a, b)), int(max(a, b)), float(l)) for a, b, l in zip(par, child, ln)
    )
    return MstEdgeSet(edges, float(ln.sum()))


# ------------------------------------------------------------ PH dimension

def alpha_weighted_sum(d: PersistenceDiagram, hom_dim: int, alpha: float = DEFAULT_ALPHA) -> float:
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    if d.dims and hom_dim not in d.dims:
        raise ValidationError(f"dimension {hom_dim} was not computed for this diagram")
    a = d[hom_dim]
    if np.any(np.isinf(a[:, 1])):
        raise ValidationError("diagram has infinite intervals; reduce it first")
    return float(np.sum((a[:, 1] - a[:, 0]) ** alpha))


def weighted_sum_for_cloud(cloud: PointCloud, hom_dim: int, alpha: float) -> float:
    if hom_dim == 0:
        if cloud.count > DENSE_MST_LIMIT or cloud.count < 2:
            lengths = mst_from_points(cloud).lengths
        else:
            lengths = mst_edges(cloud).lengths
        return float(np.sum(lengths ** alpha))
    return alpha_weighted_sum(persistent_diagram(cloud, max_dim=hom_dim + 1), hom_dim, alpha)


def geometric_sizes(n_max: int, count: int = DEFAULT_N_SIZES, n_min: int = 2) -> list[int]:
    """``ceil(n_max * 2**(j - count))`` for ``j = 1..count``, deduplicated."""
    sizes = sorted({math.ceil(n_max * 2.0 ** (j - count)) for j in range(1, count + 1)})
    return [s for s in sizes if s >= n_min]


def fit_dimension(sizes: Sequence[int], sums: Sequence[float], alpha: float, hom_dim: int = 0) -> DimensionEstimate:
    sizes = [int(s) for s in sizes]
    if len(sizes) < 2:
        raise ValidationError("need at least two sample sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError("sample sizes must be strictly increasing")
    sums = np.asarray(sums, dtype=float)
    if np.any(sums <= 0):
        raise DegenerateFitError("weighted sums must be positive for a log-log fit")
    log_n = np.log(sizes)
    log_e = np.log(sums)
    fit = stats.linregress(log_n, log_e)
    beta = float(fit.slope)
    stderr = float(fit.stderr) if len(sizes) > 2 else 0.0
    if beta >= 1:
        raise DegenerateFitError(f"fitted slope {beta:.4f} >= 1; dimension undefined")
    dim = alpha / (1.0 - beta)
    unc = alpha * stderr / (1.0 - beta) ** 2
    return DimensionEstimate(dim, unc, float(alpha), tuple(sizes), tuple(map(float, log_e)), beta, stderr, hom_dim)


def estimate_dimension(
    sampler: PointSampler,
    sizes: Sequence[int],
    alpha: float = DEFAULT_ALPHA,
    hom_dim: int = 0,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> DimensionEstimate:
    """Persistent-homology dimension from trial-mean weighted sums.

    The expectation of the weighted sum at each ``n`` is approximated by
    the mean over ``trials`` independent draws.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    rng = np.random.default_rng(seed)
    means = []
    for n in sizes:
        vals = [weighted_sum_for_cloud(sampler(int(n), rng), hom_dim, alpha) for _ in range(trials)]
        means.append(float(np.mean(vals)))
    return fit_dimension(sizes, means, alpha, hom_dim)


# ------------------------------------------------------------ box counting

def box_counting_dimension(cloud: PointCloud, scales: Sequence[float]) -> BoxCountEstimate:
    """Slope of ``log N(eps)`` against ``-log eps`` for occupied grid cells.

    The grid is anchored at the bounding-box minimum.
    """
    scales = [float(s) for s in scales]
    if len(scales) < 2:
        raise ValidationError("need at least two scales")
    if any(s <= 0 for s in scales):
        raise ValidationError("scales must be positive")
    x = cloud.points
    if cloud.count <= 1 or np.all(np.ptp(x, axis=0) == 0):
        return BoxCountEstimate(0.0, 0.0, tuple(scales), tuple(1 for _ in scales), degenerate=True)
    lo = x.min(axis=0)
    counts = []
    for eps in scales:
        cells = np.floor((x - lo) / eps).astype(np.int64)
        counts.append(len(np.unique(cells, axis=0)))
    fit = stats.linregress(-np.log(scales), np.log(counts))
    stderr = float(fit.stderr) if len(scales) > 2 else 0.0
    return BoxCountEstimate(float(fit.slope), stderr, tuple(scales), tuple(counts))


# ------------------------------------------------------------ samplers

def uniform_cube_sampler(dim: int) -> PointSampler:
    def sample(n, rng):
        return PointCloud(rng.random((n, dim)))

    return sample


class HenonSampler:
    """``n`` consecutive iterates after a random extra transient.

    The map mixes quickly, so consecutive iterates already spread over the
    whole attractor.
    """

    def __init__(self, params=None, initial=DEFAULT_INITIAL["henon"], transient: int = 100, max_offset: int = 10_000):
        self.params = dict(params or {})
        self.initial = tuple(initial)
        self.transient = transient
        self.max_offset = max_offset

    def __call__(self, n, rng):
        off = int(rng.integers(0, self.max_offset + 1))
        return generate_henon(MapSpec(self.params, self.initial, self.transient + off, n))


class FlowSampler:
    """Evenly strided states from one long reference orbit.

    The orbit (``length`` states ``dt * stride`` apart) is integrated once;
    a draw of ``n`` takes every ``length // n``-th state from a random phase.
    """

    def __init__(self, system: str, length: int = 20_000, dt: float = 0.01, stride: int = 10,
                 transient_steps: int = 1000, params=None, initial=None):
        self.system = system
        self.length = int(length)
        steps = transient_steps + (self.length - 1) * stride
        traj = integrate(system, params or {}, initial or DEFAULT_INITIAL[system], dt, steps)
        self.orbit = traj[transient_steps::stride][: self.length]

    def __call__(self, n, rng):
        if n > self.length:
            raise ValidationError(f"cannot draw {n} points from an orbit of {self.length}")
        step = self.length // n
        off = int(rng.integers(0, step)) if step > 1 else 0
        return PointCloud(self.orbit[off::step][:n])
