"""Point clouds, Euclidean distance matrices and metric-axiom checks."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyInputError, ResourceError, ValidationError

#: Largest cloud for which a dense distance matrix is built.
DEFAULT_MAX_POINTS = 5000


class PointCloud:
    """An immutable ``(count, dim)`` array of finite coordinates."""

    __slots__ = ("_points",)

    def __init__(self, points, dim: int | None = None):
        arr = np.array(points, dtype=float)
        if arr.ndim == 1:
            # a flat list is a list of 1-D points unless it is empty
            arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, dim or 1)
        if arr.ndim != 2:
            raise ValidationError(f"points must be a 2-D array, got shape {arr.shape}")
        if dim is not None and arr.shape[1] != dim:
            raise ValidationError(f"expected {dim} coordinates per point, got {arr.shape[1]}")
        if arr.shape[1] < 1:
            raise ValidationError("dim must be positive")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValidationError(f"non-finite coordinate at point {bad[0]}, axis {bad[1]}")
        arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def count(self) -> int:
        return self._points.shape[0]

    def __len__(self) -> int:
        return self.count

    def __repr__(self) -> str:
        return f"PointCloud(count={self.count}, dim={self.dim})"

    def subset(self, indices) -> "PointCloud":
        return PointCloud(self._points[np.asarray(indices, dtype=int)])

    def scaled(self, c: float) -> "PointCloud":
        return PointCloud(self._points * c)


class DistanceMatrix:
    """Symmetric ``n x n`` matrix of pairwise distances.

    Construction does not check the metric axioms; use :func:`validate_metric`.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"distance matrix must be square, got shape {arr.shape}")
        arr.setflags(write=False)
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, ij):
        return self._entries[ij]

    def __repr__(self) -> str:
        return f"DistanceMatrix(n={self.n})"


def build_distance_matrix(cloud: PointCloud, max_points: int = DEFAULT_MAX_POINTS) -> DistanceMatrix:
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(cloud)
    if cloud.count == 0:
        raise EmptyInputError("cannot build a distance matrix of an empty cloud")
    if cloud.count > max_points:
        raise ResourceError(
            f"{cloud.count} points exceeds the dense distance-matrix cap of {max_points}"
        )
    x = cloud.points
    # difference form is exact on the diagonal and symmetric bit-for-bit
    diff = x[:, None, :] - x[None, :, :]
    return DistanceMatrix(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)))


@dataclass(frozen=True)
class Violation:
    axiom: str  # square, finite, nonnegative, zero-diagonal, symmetry, triangle
    indices: tuple

    def __str__(self) -> str:
        return f"{self.axiom} violated at {self.indices}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}


def validate_metric(m, tol: float = 1e-12) -> ValidationReport:
    """List every violated metric axiom with witnessing indices.

    The triangle check is cubic in ``n``; call it on small matrices only.
    """
    d = np.asarray(m.entries if isinstance(m, DistanceMatrix) else m, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        return ValidationReport((Violation("square", tuple(d.shape)),))
    n = d.shape[0]
    out: list[Violation] = []
    for i, j in np.argwhere(~np.isfinite(d)):
        out.append(Violation("finite", (int(i), int(j))))
    for i, j in np.argwhere(d < -tol):
        out.append(Violation("nonnegative", (int(i), int(j))))
    for i in np.flatnonzero(np.abs(np.diag(d)) > tol):
        out.append(Violation("zero-diagonal", (int(i), int(i))))
    with np.errstate(invalid="ignore"):  # inf - inf
        asym = np.abs(d - d.T) > tol
    for i, j in zip(*np.nonzero(asym)):
        if i < j:
            out.append(Violation("symmetry", (int(i), int(j))))
    for i, j, k in itertools.permutations(range(n), 3):
        if i < k and d[i, k] > d[i, j] + d[j, k] + tol:
            out.append(Violation("triangle", (i, j, k)))
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------- CSV I/O

def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_point_cloud_csv(source) -> PointCloud:
    """Read one point per row; a non-numeric first row is treated as a header."""
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if not rows:
        raise EmptyInputError(f"no points in {source}")
    width = len(rows[0])
    for k, r in enumerate(rows):
        if len(r) != width:
            raise ValidationError(f"row {k} has {len(r)} columns, expected {width}")
    try:
        data = [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise ValidationError(f"non-numeric entry: {exc}") from None
    return PointCloud(data)


def write_point_cloud_csv(cloud: PointCloud, dest, header: list[str] | None = None) -> None:
    from .fmt import fmt_float

    lines = []
    if header is not None:
        lines.append(",".join(header))
    for p in cloud.points:
        lines.append(",".join(fmt_float(v) for v in p))
    Path(dest).write_text("\n".join(lines) + "\n")
