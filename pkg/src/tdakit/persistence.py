"""Persistent homology over Z/2: diagrams, reduction, Betti numbers.

Two routes compute the same diagrams:

* :func:`compute_persistence` reduces the explicit boundary matrix of a
  materialized :class:`~tdakit.filtration.Filtration` (with clearing).
* :func:`vr_persistence` works straight from a distance matrix with the
  numba kernels in :mod:`tdakit._reduction` and never builds the simplex
  list; this is the route every pipeline uses.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import _reduction as kern
from .errors import ResourceError, StructuralError, ValidationError
from .filtration import (
    DEFAULT_MAX_DIM,
    DEFAULT_SIMPLEX_BUDGET,
    ENCLOSING,
    MAX_SUPPORTED_DIM,
    Filtration,
    _as_distance_matrix,
    resolve_max_scale,
)
from .fmt import fmt_float


@dataclass(frozen=True)
class PersistenceInterval:
    hom_dim: int
    birth: float
    death: float

    @property
    def length(self) -> float:
        return self.death - self.birth

    def __post_init__(self):
        if self.death < self.birth:
            raise ValidationError(f"death {self.death} precedes birth {self.birth}")


def _as_pairs(a) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1, 2)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PersistenceDiagram:
    """Intervals grouped by homology dimension.

    ``pairs[k]`` is a ``(m, 2)`` array of (birth, death) rows sorted
    lexicographically; ``dims`` lists every dimension that was computed,
    including those with no intervals.
    """

    pairs: Mapping[int, np.ndarray]
    reduced: bool = False
    source_points: int = 0
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        clean = {}
        for k, a in self.pairs.items():
            arr = np.array(a, dtype=float).reshape(-1, 2)
            if arr.size and np.any(arr[:, 1] < arr[:, 0]):
                raise ValidationError("interval with death < birth")
            arr = arr[arr[:, 1] > arr[:, 0]]  # zero-length intervals carry nothing
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))] if arr.size else arr
            clean[int(k)] = _as_pairs(arr)
        dims = tuple(sorted(set(self.dims) | set(clean)))
        for k in dims:
            clean.setdefault(k, _as_pairs(np.empty((0, 2))))
        object.__setattr__(self, "pairs", dict(sorted(clean.items())))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_intervals(cls, intervals: Iterable, **kw) -> "PersistenceDiagram":
        groups: dict[int, list] = {}
        for it in intervals:
            if isinstance(it, PersistenceInterval):
                k, b, d = it.hom_dim, it.birth, it.death
            else:
                k, b, d = it
            groups.setdefault(int(k), []).append((b, d))
        return cls(groups, **kw)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.pairs.get(k, _as_pairs(np.empty((0, 2))))

    def __len__(self) -> int:
        return sum(len(a) for a in self.pairs.values())

    @property
    def intervals(self) -> list[PersistenceInterval]:
        return [
            PersistenceInterval(k, float(b), float(d))
            for k, a in self.pairs.items()
            for b, d in a
        ]

    def finite(self, k: int) -> np.ndarray:
        a = self[k]
        return a[np.isfinite(a[:, 1])]

    def n_infinite(self, k: int = 0) -> int:
        return int(np.count_nonzero(np.isinf(self[k][:, 1])))

    def persistence(self, k: int) -> np.ndarray:
        a = self[k]
        return a[:, 1] - a[:, 0]

    def scaled(self, c: float) -> "PersistenceDiagram":
        return PersistenceDiagram(
            {k: a * c for k, a in self.pairs.items()},
            reduced=self.reduced,
            source_points=self.source_points,
            dims=self.dims,
        )

    def restrict(self, dims: Iterable[int]) -> "PersistenceDiagram":
        dims = set(dims)
        return PersistenceDiagram(
            {k: a for k, a in self.pairs.items() if k in dims},
            reduced=self.reduced,
            source_points=self.source_points,
            dims=tuple(k for k in self.dims if k in dims),
        )

    def equals(self, other: "PersistenceDiagram", atol: float = 0.0) -> bool:
        if set(self.dims) != set(other.dims):
            return False
        for k in self.dims:
            a, b = self[k], other[k]
            if a.shape != b.shape:
                return False
            fin = np.isfinite(a)
            if not np.array_equal(fin, np.isfinite(b)):
                return False
            if not np.allclose(a[fin], b[fin], atol=atol, rtol=0):
                return False
        return True


@dataclass(frozen=True)
class BettiProfile:
    eps: float
    betti: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.betti[k] if k < len(self.betti) else 0


# ------------------------------------------------------------ explicit route

def _reduce_boundary(f: Filtration) -> tuple[dict[int, int], set[int]]:
    """Reduce columns top dimension first; returns (pivot row -> column, negative columns)."""
    simplices = f.simplices
    pos = {s.vertices: i for i, s in enumerate(simplices)}
    by_dim: dict[int, list[int]] = {}
    for i, s in enumerate(simplices):
        by_dim.setdefault(s.dimension, []).append(i)
    low_of: dict[int, int] = {}
    reduced: dict[int, int] = {}
    for k in range(f.max_dim, 0, -1):
        for j in by_dim.get(k, ()):
            if j in low_of:  # clearing: a pivot row's own column reduces to zero
                continue
            col = 0
            for face in simplices[j].facets():
                col |= 1 << pos[face]
            while col:
                low = col.bit_length() - 1
                other = low_of.get(low)
                if other is None:
                    low_of[low] = j
                    reduced[j] = col
                    break
                col ^= reduced[other]
    return low_of, set(reduced)


def compute_persistence(f: Filtration) -> PersistenceDiagram:
    """Unreduced diagram of an explicit filtration.

    Columns are Python ints used as Z/2 bit vectors (bit ``i`` is the i-th
    simplex).  Only dimensions ``0 .. max_dim - 1`` are reported: classes in
    the top dimension could never die.
    """
    if f.max_dim < 1:
        raise ValidationError("persistence needs a filtration with max_dim >= 1")
    f.check_face_closure()
    low_of, negative = _reduce_boundary(f)
    groups: dict[int, list] = {k: [] for k in range(f.max_dim)}
    for i, s in enumerate(f.simplices):
        k = s.dimension
        if k >= f.max_dim or i in negative:
            continue
        j = low_of.get(i)
        death = math.inf if j is None else f.simplices[j].value
        groups[k].append((s.value, death))
    return PersistenceDiagram(
        groups, reduced=False, source_points=f.n_vertices, dims=tuple(range(f.max_dim))
    )


# ------------------------------------------------------------ implicit VR route

def vr_persistence(
    m,
    max_dim: int = DEFAULT_MAX_DIM,
    max_scale=ENCLOSING,
    budget: int = DEFAULT_SIMPLEX_BUDGET,
) -> PersistenceDiagram:
    """Unreduced VR diagram straight from a distance matrix or point cloud.

    Same intervals as ``compute_persistence(build_vr_filtration(...))``.
    The budget only bounds explicitly enumerated columns (triangles when
    ``max_dim == 3``); edges and their cofaces are streamed.
    """
    m = _as_distance_matrix(m)
    if int(max_dim) != max_dim or max_dim < 1:
        raise ValidationError(f"max_dim must be an integer >= 1, got {max_dim}")
    if max_dim > MAX_SUPPORTED_DIM:
        raise ValidationError(f"max_dim above {MAX_SUPPORTED_DIM} is not supported")
    max_dim = int(max_dim)
    n = m.n
    thr = resolve_max_scale(m, max_scale)
    dist = np.ascontiguousarray(m.entries, dtype=np.float64)
    groups: dict[int, np.ndarray] = {}

    e_verts, e_vals, e_idx = kern.enumerate_edges(dist, thr)
    order = np.argsort(e_vals, kind="stable")  # (value, index) ascending
    merged = kern.kruskal(n, e_verts, order)
    deaths0 = e_vals[merged]
    n_comp = n - len(merged)
    groups[0] = np.column_stack(
        [np.zeros(n), np.concatenate([deaths0, np.full(n_comp, np.inf)])]
    )
    if max_dim >= 2:
        binom = kern.binomial_table(n, max_dim + 1)
        keep = np.ones(len(e_vals), dtype=bool)
        keep[merged] = False
        cols = order[::-1][keep[order[::-1]]]
        b, d, pivots = kern.reduce_cohomology(
            e_verts[cols], e_vals[cols], e_idx[cols], dist, thr, binom
        )
        groups[1] = np.column_stack([b, d])
        if max_dim >= 3:
            count = kern.count_triangles(dist, thr)
            if count > budget:
                raise ResourceError(
                    f"{count} triangles exceeds the simplex budget of {budget}"
                )
            t_verts, t_vals, t_idx = kern.enumerate_triangles(dist, thr, binom, count)
            keep = ~np.isin(t_idx, pivots)
            t_order = np.lexsort((t_idx, t_vals))[::-1]
            cols = t_order[keep[t_order]]
            b, d, _ = kern.reduce_cohomology(
                t_verts[cols], t_vals[cols], t_idx[cols], dist, thr, binom
            )
            groups[2] = np.column_stack([b, d])
    return PersistenceDiagram(groups, reduced=False, source_points=n, dims=tuple(range(max_dim)))


# ------------------------------------------------------------ diagram operations

def reduce_diagram(d: PersistenceDiagram) -> PersistenceDiagram:
    """Drop the single infinite dimension-0 bar (reduced homology)."""
    if d.reduced:
        return d
    h0 = d[0]
    inf_rows = np.isinf(h0[:, 1])
    n_inf = int(inf_rows.sum())
    if n_inf == 0 and d.source_points > 0:
        raise StructuralError("diagram has no infinite dimension-0 bar to remove")
    if n_inf > 1:
        raise StructuralError(
            f"final complex has {n_inf} connected components; raise max_scale "
            "or handle the disconnection explicitly"
        )
    pairs = dict(d.pairs)
    pairs[0] = h0[~inf_rows]
    return PersistenceDiagram(pairs, reduced=True, source_points=d.source_points, dims=d.dims)


def betti_at(d: PersistenceDiagram, eps: float) -> BettiProfile:
    """Betti numbers at ``eps``: intervals with ``birth <= eps < death``."""
    top = max(d.dims, default=-1)
    betti = []
    for k in range(top + 1):
        a = d[k]
        betti.append(int(np.count_nonzero((a[:, 0] <= eps) & (eps < a[:, 1]))))
    return BettiProfile(float(eps), tuple(betti))


def h0_intervals_unionfind(m) -> PersistenceDiagram:
    """Reduced dimension-0 diagram by Kruskal merging over all pairs.

    Each merge at edge length ``l`` contributes the interval ``(0, l)``.
    """
    m = _as_distance_matrix(m)
    n = m.n
    dist = np.ascontiguousarray(m.entries, dtype=np.float64)
    e_verts, e_vals, _ = kern.enumerate_edges(dist, math.inf)
    order = np.argsort(e_vals, kind="stable")
    merged = kern.kruskal(n, e_verts, order)
    deaths = e_vals[merged]
    return PersistenceDiagram(
        {0: np.column_stack([np.zeros(len(deaths)), deaths])},
        reduced=True,
        source_points=n,
        dims=(0,),
    )


def persistent_diagram(cloud_or_matrix, max_dim=DEFAULT_MAX_DIM, max_scale=ENCLOSING) -> PersistenceDiagram:
    """Reduced VR diagram; the usual entry point for pipelines."""
    return reduce_diagram(vr_persistence(cloud_or_matrix, max_dim=max_dim, max_scale=max_scale))


# ------------------------------------------------------------ CSV I/O

def write_diagram_csv(d: PersistenceDiagram, dest) -> None:
    lines = ["dim,birth,death"]
    for k, a in d.pairs.items():
        for b, e in a:
            lines.append(f"{k},{fmt_float(b)},{fmt_float(e)}")
    Path(dest).write_text("\n".join(lines) + "\n")


def diagram_to_csv_string(d: PersistenceDiagram) -> str:
    buf = io.StringIO()
    buf.write("dim,birth,death\n")
    for k, a in d.pairs.items():
        for b, e in a:
            buf.write(f"{k},{fmt_float(b)},{fmt_float(e)}\n")
    return buf.getvalue()


def read_diagram_csv(source, reduced: bool | None = None) -> PersistenceDiagram:
    """Read ``dim,birth,death`` rows; ``inf`` marks infinite deaths.

    Unless given, ``reduced`` is inferred: true when no dimension-0 row is infinite.
    """
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and rows[0][0].strip().lower() in ("dim", "hom_dim"):
        rows = rows[1:]
    groups: dict[int, list] = {}
    for k, r in enumerate(rows):
        if len(r) != 3:
            raise ValidationError(f"diagram row {k} has {len(r)} fields, expected 3")
        try:
            dim, b, e = int(r[0]), float(r[1]), float(r[2])
        except ValueError:
            raise ValidationError(f"bad diagram row {k}: {r}") from None
        groups.setdefault(dim, []).append((b, e))
    if reduced is None:
        reduced = not any(math.isinf(e) for _, e in groups.get(0, []))
    return PersistenceDiagram(groups, reduced=reduced)
