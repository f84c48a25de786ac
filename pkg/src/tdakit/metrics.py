"""Wasserstein distances between persistence diagrams and partition tables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import StructuralError, ValidationError
from .fmt import fmt_float
from .persistence import PersistenceDiagram

DEFAULT_P = 2.0
DEFAULT_DIMS = (1,)

# Marks the diagonal in a matching pair.
DIAGONAL = None


@dataclass(frozen=True)
class MatchingResult:
    """Optimal matching; each pair is ``(dim, a, b)`` with ``a``/``b`` a
    ``(birth, death)`` tuple or ``None`` for the diagonal."""

    cost: float
    pairs: tuple
    p: float

    def recomputed_cost(self) -> float:
        total = 0.0
        for _, a, b in self.pairs:
            total += _pair_cost(a, b) ** self.p
        return total ** (1.0 / self.p)


def _pair_cost(a, b) -> float:
    if a is None and b is None:
        return 0.0
    if a is None:
        return (b[1] - b[0]) / 2.0
    if b is None:
        return (a[1] - a[0]) / 2.0
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _check_finite(d: PersistenceDiagram, dims, name: str) -> None:
    for k in dims:
        if np.any(np.isinf(d[k])):
            raise StructuralError(
                f"{name} has an infinite interval in dimension {k}; reduce the diagram first"
            )


def _match_dim(a: np.ndarray, b: np.ndarray, p: float):
    """Exact min-cost matching of one dimension with diagonal augmentation.

    Returns (sum of p-th powers, list of (a_or_None, b_or_None)).
    """
    n, m = len(a), len(b)
    if n == 0 and m == 0:
        return 0.0, []
    da = (a[:, 1] - a[:, 0]) / 2.0
    db = (b[:, 1] - b[:, 0]) / 2.0
    big = np.inf
    c = np.zeros((n + m, m + n))
    if n and m:
        c[:n, :m] = np.maximum(
            np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1])
        ) ** p
    # a_i -> its own diagonal slot only
    c[:n, m:] = big
    c[np.arange(n), m + np.arange(n)] = da ** p
    c[n:, :m] = big
    c[n + np.arange(m), np.arange(m)] = db ** p
    # finite stand-in for forbidden slots; larger than any feasible assignment
    finite_max = float(np.max(c[np.isfinite(c)], initial=0.0))
    c[np.isinf(c)] = (finite_max + 1.0) * (n + m + 1)
    rows, cols = linear_sum_assignment(c)
    total = 0.0
    pairs = []
    for r, q in zip(rows, cols):
        if r < n and q < m:
            pairs.append((tuple(map(float, a[r])), tuple(map(float, b[q]))))
            total += c[r, q]
        elif r < n:
            pairs.append((tuple(map(float, a[r])), DIAGONAL))
            total += c[r, q]
        elif q < m:
            pairs.append((DIAGONAL, tuple(map(float, b[q]))))
            total += c[r, q]
    return total, pairs


def wasserstein(
    d1: PersistenceDiagram,
    d2: PersistenceDiagram,
    p: float = DEFAULT_P,
    dims: Iterable[int] = DEFAULT_DIMS,
) -> MatchingResult:
    """p-Wasserstein distance under the sup ground metric.

    Intervals may be matched to the diagonal at half their length.  Per
    dimension p-th powers are summed before taking the root.
    """
    p = float(p)
    if not p >= 1 or math.isinf(p):
        raise ValidationError(f"p must be a finite real >= 1, got {p}")
    dims = tuple(sorted(set(dims)))
    _check_finite(d1, dims, "first diagram")
    _check_finite(d2, dims, "second diagram")
    total = 0.0
    pairs = []
    for k in dims:
        s, pr = _match_dim(d1[k], d2[k], p)
        total += s
        pairs.extend((k, x, y) for x, y in pr)
    return MatchingResult(total ** (1.0 / p), tuple(pairs), p)


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram, dims: Iterable[int] = DEFAULT_DIMS) -> float:
    """Bottleneck distance by bisection over candidate costs (used for stability checks)."""
    best = 0.0
    for k in sorted(set(dims)):
        a, b = d1[k], d2[k]
        a = a[np.isfinite(a[:, 1])]
        b = b[np.isfinite(b[:, 1])]
        n, m = len(a), len(b)
        if n + m == 0:
            continue
        c = np.full((n + m, m + n), np.inf)
        if n and m:
            c[:n, :m] = np.maximum(
                np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1])
            )
        c[np.arange(n), m + np.arange(n)] = (a[:, 1] - a[:, 0]) / 2
        c[n + np.arange(m), np.arange(m)] = (b[:, 1] - b[:, 0]) / 2
        c[n:, m:] = 0.0
        cands = np.unique(c[np.isfinite(c)])
        lo, hi = 0, len(cands) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            feasible = np.where(c <= cands[mid], 0.0, 1.0)
            r, q = linear_sum_assignment(feasible)
            if feasible[r, q].sum() == 0:
                hi = mid
            else:
                lo = mid + 1
        best = max(best, float(cands[lo]))
    return best


# ------------------------------------------------------------ partition tables

@dataclass(frozen=True)
class PartitionDistanceTable:
    labels: tuple[str, ...]
    matrix: np.ndarray
    p: float
    dims: tuple[int, ...]

    def __getitem__(self, ij):
        a, b = ij
        return float(self.matrix[self.labels.index(a), self.labels.index(b)])

    def write_csv(self, dest) -> None:
        lines = ["," + ",".join(self.labels)]
        for lab, row in zip(self.labels, self.matrix):
            lines.append(lab + "," + ",".join(fmt_float(v) for v in row))
        Path(dest).write_text("\n".join(lines) + "\n")


def wd_matrix(
    diagrams: Mapping[str, PersistenceDiagram] | Sequence[tuple[str, PersistenceDiagram]],
    p: float = DEFAULT_P,
    dims: Iterable[int] = DEFAULT_DIMS,
) -> PartitionDistanceTable:
    items = list(diagrams.items()) if isinstance(diagrams, Mapping) else list(diagrams)
    if len(items) < 2:
        raise ValidationError("need at least two diagrams")
    labels = tuple(str(k) for k, _ in items)
    if len(set(labels)) != len(labels):
        raise ValidationError("duplicate labels")
    dims = tuple(sorted(set(dims)))
    n = len(items)
    mat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mat[i, j] = mat[j, i] = wasserstein(items[i][1], items[j][1], p, dims).cost
    mat.setflags(write=False)
    return PartitionDistanceTable(labels, mat, float(p), dims)


@dataclass(frozen=True)
class ScaledRow:
    label: str
    wd_sum: float
    count: int
    scaled_wd: float


def summed_scaled(table: PartitionDistanceTable, counts: Mapping[str, int]) -> list[ScaledRow]:
    """Row sums of the distance matrix, and those sums divided by point counts."""
    rows = []
    for lab, r in zip(table.labels, table.matrix):
        if lab not in counts:
            raise ValidationError(f"no point count for label {lab!r}")
        cnt = int(counts[lab])
        if cnt <= 0:
            raise ValidationError(f"count for {lab!r} must be positive")
        s = float(np.sum(r))
        rows.append(ScaledRow(lab, s, cnt, s / cnt))
    return rows


def write_scaled_csv(rows: Sequence[ScaledRow], dest) -> None:
    lines = ["label,wd_sum,count,scaled_wd"]
    for r in rows:
        lines.append(f"{r.label},{fmt_float(r.wd_sum)},{r.count},{fmt_float(r.scaled_wd)}")
    Path(dest).write_text("\n".join(lines) + "\n")


def argmax_label(rows: Sequence[ScaledRow]) -> str:
    return max(rows, key=lambda r: r.scaled_wd).label
