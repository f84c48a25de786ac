"""Explicit Vietoris-Rips filtrations.

Simplices are materialized as Python objects, so this module is meant for
small and medium clouds (debugging, golden tests, oracles).  Large clouds go
through :func:`tdakit.persistence.vr_persistence`, which never builds the
simplex list.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ResourceError, StructuralError, ValidationError
from .fmt import fmt_float
from .geometry import DistanceMatrix, PointCloud, build_distance_matrix

DEFAULT_MAX_DIM = 2
MAX_SUPPORTED_DIM = 3
DEFAULT_SIMPLEX_BUDGET = 10**7

ENCLOSING = "enclosing"


@dataclass(frozen=True, order=False)
class Simplex:
    vertices: tuple[int, ...]
    value: float

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def sort_key(self):
        return (self.value, len(self.vertices), self.vertices)

    def facets(self):
        v = self.vertices
        if len(v) == 1:
            return ()
        return tuple(v[:i] + v[i + 1:] for i in range(len(v)))


@dataclass(frozen=True)
class Filtration:
    """Simplices ordered by (value, dimension, vertex tuple)."""

    simplices: tuple[Simplex, ...]
    max_dim: int
    max_scale: float  # math.inf when unbounded
    n_vertices: int = 0

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.simplices], dtype=float)

    def check_face_closure(self) -> None:
        """Raise :class:`StructuralError` unless every facet precedes its simplex."""
        seen: dict[tuple[int, ...], float] = {}
        prev = None
        for s in self.simplices:
            key = s.sort_key()
            if prev is not None and key < prev:
                raise StructuralError(f"simplex {s.vertices} is out of filtration order")
            prev = key
            for f in s.facets():
                fv = seen.get(f)
                if fv is None:
                    raise StructuralError(
                        f"simplex {s.vertices} appears before its face {f}"
                    )
                if fv > s.value:
                    raise StructuralError(
                        f"face {f} of {s.vertices} has larger value {fv} > {s.value}"
                    )
            seen[s.vertices] = s.value

    def write_csv(self, dest) -> None:
        lines = ["value,dim,vertices"]
        for s in self.simplices:
            lines.append(",".join([fmt_float(s.value), str(s.dimension), *map(str, s.vertices)]))
        Path(dest).write_text("\n".join(lines) + "\n")


def enclosing_radius(m: DistanceMatrix) -> float:
    """Minimax distance: ``min_i max_j d(i, j)``.

    Above this scale the VR complex is a cone, so all reduced homology is trivial.
    """
    d = m.entries
    if d.shape[0] == 0:
        return 0.0
    return float(d.max(axis=1).min())


def resolve_max_scale(m: DistanceMatrix, max_scale) -> float:
    if max_scale is None:
        return math.inf
    if isinstance(max_scale, str):
        if max_scale == ENCLOSING:
            return enclosing_radius(m)
        if max_scale in ("inf", "unbounded"):
            return math.inf
        raise ValidationError(f"unknown max_scale {max_scale!r}")
    max_scale = float(max_scale)
    if math.isnan(max_scale) or max_scale < 0:
        raise ValidationError(f"max_scale must be nonnegative, got {max_scale}")
    return max_scale


def _as_distance_matrix(m) -> DistanceMatrix:
    if isinstance(m, DistanceMatrix):
        return m
    if isinstance(m, PointCloud):
        return build_distance_matrix(m)
    return DistanceMatrix(m)


def build_vr_filtration(
    m,
    max_dim: int = DEFAULT_MAX_DIM,
    max_scale=ENCLOSING,
    budget: int = DEFAULT_SIMPLEX_BUDGET,
) -> Filtration:
    """Vietoris-Rips filtration of a distance matrix (or point cloud).

    A vertex set enters at the largest of its pairwise distances, and only
    if that is ``<= max_scale`` (closed condition).
    """
    m = _as_distance_matrix(m)
    if int(max_dim) != max_dim or max_dim < 0:
        raise ValidationError(f"max_dim must be a nonnegative integer, got {max_dim}")
    if max_dim > MAX_SUPPORTED_DIM:
        raise ValidationError(f"max_dim above {MAX_SUPPORTED_DIM} is not supported")
    max_dim = int(max_dim)
    thr = resolve_max_scale(m, max_scale)
    d = m.entries
    n = m.n

    adj = d <= thr
    np.fill_diagonal(adj, False)
    n_edges = int(np.count_nonzero(np.triu(adj))) if max_dim >= 1 else 0
    if n + n_edges > budget:
        raise ResourceError(f"VR filtration needs more than the simplex budget of {budget}")

    out: list[Simplex] = [Simplex((i,), 0.0) for i in range(n)]
    # grow cliques by appending a larger common neighbour
    upper = [np.flatnonzero(adj[i, i + 1:]) + i + 1 for i in range(n)]
    frontier: list[tuple[tuple[int, ...], float, np.ndarray]] = []
    if max_dim >= 1:
        for i in range(n):
            for j in upper[i]:
                j = int(j)
                val = float(d[i, j])
                out.append(Simplex((i, j), val))
                frontier.append(((i, j), val, np.intersect1d(upper[i], upper[j], assume_unique=True)))
    for _ in range(2, max_dim + 1):
        nxt = []
        for verts, val, cands in frontier:
            for w in cands:
                w = int(w)
                v = max(val, float(d[list(verts), w].max()))
                out.append(Simplex(verts + (w,), v))
                if len(out) > budget:
                    raise ResourceError(
                        f"VR filtration needs more than the simplex budget of {budget}"
                    )
                nxt.append((verts + (w,), v, cands[cands > w][adj[w, cands[cands > w]]]))
        frontier = nxt
    out.sort(key=Simplex.sort_key)
    return Filtration(tuple(out), max_dim, thr, n)


def complex_at_scale(f: Filtration, eps: float) -> tuple[int, ...]:
    """Number of simplices with value ``<= eps`` in each dimension 0..max_dim."""
    if eps < 0:
        raise ValidationError("eps must be nonnegative")
    counts = [0] * (f.max_dim + 1)
    # filtration is sorted by value, so stop at the first larger value
    vals = [s.value for s in f.simplices]
    stop = bisect.bisect_right(vals, eps)
    for s in f.simplices[:stop]:
        counts[s.dimension] += 1
    return tuple(counts)
