"""Takens delay embedding, WD-driven delay selection and PCA projection."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dynsys import PRESETS, FlowSpec, generate_flow
from .errors import SweepShapeError, ValidationError
from .fmt import fmt_float
from .geometry import PointCloud
from .metrics import DEFAULT_DIMS, DEFAULT_P, wasserstein
from .persistence import PersistenceDiagram, persistent_diagram

DEFAULT_SUBSAMPLE = 700
DEFAULT_EMBED_DIM = 3


@dataclass(frozen=True)
class DelaySpec:
    delay: int
    dim: int = DEFAULT_EMBED_DIM

    def __post_init__(self):
        if int(self.delay) != self.delay or self.delay < 1:
            raise ValidationError(f"delay must be a positive integer, got {self.delay}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError(f"embedding dimension must be a positive integer, got {self.dim}")

    def min_length(self) -> int:
        return (self.dim - 1) * self.delay + 1


def delay_embed(series, spec: DelaySpec) -> PointCloud:
    """Point ``i`` is ``(f[i], f[i + a], ..., f[i + (d - 1) a])``."""
    x = np.asarray(series, dtype=float).ravel()
    need = spec.min_length()
    if len(x) < need:
        raise ValidationError(
            f"series of length {len(x)} too short for delay {spec.delay} in dimension {spec.dim}; "
            f"need at least {need}"
        )
    n = len(x) - (spec.dim - 1) * spec.delay
    cols = [x[k * spec.delay : k * spec.delay + n] for k in range(spec.dim)]
    return PointCloud(np.column_stack(cols))


def even_subsample(cloud: PointCloud, size: int | None) -> PointCloud:
    """``size`` points taken at evenly spaced positions (first and last kept)."""
    if size is None or cloud.count <= size:
        return cloud
    if size < 1:
        raise ValidationError("subsample size must be >= 1")
    idx = np.unique(np.round(np.linspace(0, cloud.count - 1, size)).astype(int))
    return cloud.subset(idx)


@dataclass(frozen=True)
class DelaySweepResult:
    delays: tuple[int, ...]
    wd: tuple[float, ...]
    first_peak: int
    optimal: int

    def local_maxima(self) -> list[int]:
        w = self.wd
        return [self.delays[i] for i in range(1, len(w) - 1) if w[i] > w[i - 1] and w[i] > w[i + 1]]

    def write_csv(self, dest) -> None:
        lines = ["alpha,wd"] + [f"{a},{fmt_float(w)}" for a, w in zip(self.delays, self.wd)]
        Path(dest).write_text("\n".join(lines) + "\n")

    def write_json(self, dest) -> None:
        Path(dest).write_text(json.dumps({"first_peak": self.first_peak, "optimal": self.optimal}) + "\n")


def first_peak_index(wd: Sequence[float]) -> int | None:
    """Position of the first strict local maximum, or None."""
    for i in range(1, len(wd) - 1):
        if wd[i] > wd[i - 1] and wd[i] > wd[i + 1]:
            return i
    return None


def pick_optimal(delays: Sequence[int], wd: Sequence[float]) -> tuple[int, int]:
    """(first_peak, optimal) delays; optimal minimizes wd strictly after the peak."""
    i = first_peak_index(wd)
    if i is None:
        raise SweepShapeError("no local maximum in the wd curve; widen the delay range")
    rest = np.asarray(wd[i + 1 :], dtype=float)
    j = i + 1 + int(np.argmin(rest))  # ties go to the smallest delay
    return int(delays[i]), int(delays[j])


def sweep_wd(
    series,
    d: int,
    delays: Iterable[int],
    reference: PersistenceDiagram,
    p: float = DEFAULT_P,
    dims: Iterable[int] = DEFAULT_DIMS,
    subsample: int | None = DEFAULT_SUBSAMPLE,
    max_dim: int | None = None,
) -> tuple[list[int], list[float]]:
    dims = tuple(sorted(set(dims)))
    if max_dim is None:
        max_dim = max(dims) + 1
    delays = [int(a) for a in delays]
    if not delays:
        raise ValidationError("delay range is empty")
    if any(reference.n_infinite(k) for k in dims):
        raise ValidationError("reference diagram must be reduced")
    wd = []
    for a in delays:
        cloud = even_subsample(delay_embed(series, DelaySpec(a, d)), subsample)
        diag = persistent_diagram(cloud, max_dim=max_dim)
        wd.append(wasserstein(reference, diag, p, dims).cost)
    return delays, wd


def optimal_delay(
    series,
    d: int,
    delays: Iterable[int],
    reference: PersistenceDiagram,
    p: float = DEFAULT_P,
    dims: Iterable[int] = DEFAULT_DIMS,
    subsample: int | None = DEFAULT_SUBSAMPLE,
    max_dim: int | None = None,
) -> DelaySweepResult:
    """WD to ``reference`` for every delay; the optimum is the minimum after the first peak."""
    delays, wd = sweep_wd(series, d, delays, reference, p, dims, subsample, max_dim)
    fp, opt = pick_optimal(delays, wd)
    return DelaySweepResult(tuple(delays), tuple(wd), fp, opt)


# ------------------------------------------------------------ PCA

@dataclass(frozen=True)
class PcaProjection:
    mean: np.ndarray
    components: np.ndarray  # (k, d), rows orthonormal
    explained_variance: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def write_json(self, dest) -> None:
        Path(dest).write_text(json.dumps({
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }, indent=1) + "\n")


def pca_fit(cloud: PointCloud, k: int) -> PcaProjection:
    d = cloud.dim
    if not 1 <= k <= d:
        raise ValidationError(f"k must be in 1..{d}, got {k}")
    if cloud.count < 2:
        raise ValidationError("PCA needs at least two points")
    x = cloud.points
    mean = x.mean(axis=0)
    cov = np.cov(x - mean, rowvar=False).reshape(d, d)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals, kind="stable")[::-1][:k]
    comps = vecs[:, order].T.copy()
    for row in comps:
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if len(nz) and row[nz[0]] < 0:
            row *= -1
    var = np.clip(vals[order], 0.0, None)
    for a in (mean, comps, var):
        a.setflags(write=False)
    return PcaProjection(mean, comps, var)


def pca_transform(proj: PcaProjection, cloud: PointCloud) -> PointCloud:
    if cloud.dim != proj.mean.shape[0]:
        raise ValidationError(f"cloud has dimension {cloud.dim}, projection expects {proj.mean.shape[0]}")
    return PointCloud((cloud.points - proj.mean) @ proj.components.T)


def rossler_delay_series(max_delay: int, dim: int = DEFAULT_EMBED_DIM) -> np.ndarray:
    """x-coordinate of the Rossler topology run, extended so the largest delay still embeds 700 points."""
    cfg = PRESETS["rossler-topology"]
    count = cfg["count"] + (dim - 1) * max_delay
    return generate_flow(FlowSpec("rossler", stride=cfg["stride"], count=count)).points[:, 0]
