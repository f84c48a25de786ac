"""Z24 bridge workflow: partition natural-frequency records and compare partitions by WD.

Records are labelled Freezing / Cold / Warm by air temperature, except that
every record at or after the damage onset index is Damage whatever its
temperature.  Each partition becomes a point cloud in the space of the
selected natural frequencies; partitions are compared by the Wasserstein
distance between their reduced diagrams, summed per row and scaled by the
partition size.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .embedding import PcaProjection, pca_fit, pca_transform
from .errors import EmptyInputError, ValidationError
from .fmt import fmt_float
from .geometry import PointCloud
from .metrics import PartitionDistanceTable, ScaledRow, summed_scaled, wd_matrix
from .persistence import PersistenceDiagram, persistent_diagram

FREEZING, COLD, WARM, DAMAGE = "Freezing", "Cold", "Warm", "Damage"
LABELS = (FREEZING, COLD, WARM, DAMAGE)

SHM_P = 2.0
SHM_DIMS = (0, 1)
THREADS_ENV = "TDAKIT_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FrequencyRecord:
    index: int
    temperature: float | None
    omegas: tuple[float, ...]

    def __post_init__(self):
        om = tuple(float(w) for w in self.omegas)
        if not om:
            raise ValidationError(f"record {self.index} has no frequencies")
        if not all(math.isfinite(w) and w > 0 for w in om):
            raise ValidationError(f"record {self.index}: frequencies must be positive and finite")
        object.__setattr__(self, "omegas", om)


@dataclass(frozen=True)
class PartitionConfig:
    freezing_max: float = 0.0
    cold_max: float = 4.0
    damage_start_index: int = 3475

    def __post_init__(self):
        if not self.freezing_max < self.cold_max:
            raise ValidationError("freezing_max must be below cold_max")

    def label(self, rec: FrequencyRecord) -> str | None:
        if rec.index >= self.damage_start_index:
            return DAMAGE
        t = rec.temperature
        if t is None or not math.isfinite(t):
            return None
        if t < self.freezing_max:
            return FREEZING
        if t < self.cold_max:
            return COLD
        return WARM


@dataclass(frozen=True)
class PartitionTable:
    groups: Mapping[str, tuple[FrequencyRecord, ...]]
    provenance: Mapping[str, dict] = field(default_factory=dict)
    skipped: int = 0

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.groups)

    @property
    def counts(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.groups.items()}

    def __getitem__(self, label: str) -> tuple[FrequencyRecord, ...]:
        return self.groups[label]

    def nonempty(self) -> "PartitionTable":
        return PartitionTable({k: v for k, v in self.groups.items() if v}, self.provenance, self.skipped)

    def with_group(self, label: str, records, prov: dict | None = None) -> "PartitionTable":
        groups = dict(self.groups)
        groups[label] = tuple(records)
        provenance = dict(self.provenance)
        if prov is not None:
            provenance[label] = prov
        return PartitionTable(groups, provenance, self.skipped)


def partition_records(records: Sequence[FrequencyRecord], cfg: PartitionConfig = PartitionConfig()) -> PartitionTable:
    """Label every record; records with no usable temperature (before damage onset) are skipped."""
    if not records:
        raise EmptyInputError("no records to partition")
    idx = [r.index for r in records]
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValidationError("record indices must be strictly increasing")
    if not idx[0] <= cfg.damage_start_index:
        raise ValidationError(f"damage onset {cfg.damage_start_index} precedes every record")
    groups: dict[str, list] = {k: [] for k in LABELS}
    skipped = 0
    for r in records:
        lab = cfg.label(r)
        if lab is None:
            skipped += 1
        else:
            groups[lab].append(r)
    return PartitionTable({k: tuple(v) for k, v in groups.items()}, {}, skipped)


def split_partition(
    table: PartitionTable,
    label: str,
    fractions: Sequence[float],
    seed: int,
    names: Sequence[str] | None = None,
) -> PartitionTable:
    """Random disjoint split of one partition; the parent stays in the table.

    Sublabels default to ``Warm1``, ``Warm2``, ...  Subset sizes are the
    floors of ``fraction * count`` with the remainder going to the last ones.
    """
    if label not in table.groups:
        raise ValidationError(f"no partition named {label!r}")
    fr = np.asarray(fractions, dtype=float)
    if fr.size == 0 or np.any(fr <= 0) or not math.isclose(fr.sum(), 1.0, abs_tol=1e-9):
        raise ValidationError("fractions must be positive and sum to 1")
    recs = table[label]
    n = len(recs)
    sizes = np.floor(fr * n).astype(int)
    for t in range(n - sizes.sum()):
        sizes[-1 - (t % len(sizes))] += 1
    if np.any(sizes == 0):
        raise ValidationError(f"split of {label!r} ({n} records) would leave an empty subset")
    names = list(names) if names else [f"{label}{i + 1}" for i in range(len(sizes))]
    if len(names) != len(sizes):
        raise ValidationError("one name per fraction is required")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    out = table
    start = 0
    for name, sz in zip(names, sizes):
        pick = np.sort(perm[start : start + sz])
        start += sz
        out = out.with_group(name, [recs[i] for i in pick],
                             {"parent": label, "seed": int(seed), "fractions": [float(f) for f in fr]})
    return out


def _cloud(records, omega_subset: Sequence[int]) -> PointCloud:
    cols = [i - 1 for i in omega_subset]
    return PointCloud(np.array([[r.omegas[c] for c in cols] for r in records], dtype=float).reshape(-1, len(cols)))


def _check_subset(table: PartitionTable, omega_subset: Sequence[int]) -> None:
    width = min(len(r.omegas) for recs in table.groups.values() for r in recs)
    if not omega_subset or any(not 1 <= i <= width for i in omega_subset):
        raise ValidationError(f"frequency indices must lie in 1..{width}, got {list(omega_subset)}")


def fit_pooled_pca(table: PartitionTable, omega_subset: Sequence[int], k: int) -> PcaProjection:
    """PCA of all records of the base partitions together."""
    recs = [r for lab in LABELS if lab in table.groups for r in table[lab]]
    return pca_fit(_cloud(recs, omega_subset), k)


def partition_persistence(
    table: PartitionTable,
    omega_subset: Sequence[int] = (1, 2, 3, 4),
    max_dim: int = 2,
    projection: PcaProjection | None = None,
    threads: int | None = None,
) -> dict[str, PersistenceDiagram]:
    """Reduced diagram per nonempty partition.  ``omega_subset`` is 1-based."""
    table = table.nonempty()
    if not table.groups:
        raise EmptyInputError("every partition is empty")
    _check_subset(table, omega_subset)

    def one(label):
        cloud = _cloud(table[label], omega_subset)
        if projection is not None:
            cloud = pca_transform(projection, cloud)
        return persistent_diagram(cloud, max_dim=max_dim)

    threads = threads or default_threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            diags = list(ex.map(one, table.labels))
    else:
        diags = [one(lab) for lab in table.labels]
    return dict(zip(table.labels, diags))


@dataclass(frozen=True)
class PartitionAnalysis:
    distances: PartitionDistanceTable
    rows: tuple[ScaledRow, ...]

    @property
    def argmax(self) -> str:
        return max(self.rows, key=lambda r: r.scaled_wd).label


def analyze_partitions(
    table: PartitionTable,
    omega_subset: Sequence[int] = (1, 2, 3, 4),
    pca_k: int | None = None,
    p: float = SHM_P,
    dims: Sequence[int] = SHM_DIMS,
    max_dim: int | None = None,
    threads: int | None = None,
) -> PartitionAnalysis:
    """WD matrix and summed/scaled rows; ``pca_k`` projects onto pooled principal components first."""
    dims = tuple(sorted(set(dims)))
    if max_dim is None:
        max_dim = max(dims) + 1
    table = table.nonempty()
    proj = fit_pooled_pca(table, omega_subset, pca_k) if pca_k else None
    diags = partition_persistence(table, omega_subset, max_dim, proj, threads)
    dist = wd_matrix(diags, p, dims)
    return PartitionAnalysis(dist, tuple(summed_scaled(dist, table.counts)))


def partition_size_sweep(
    table: PartitionTable,
    sweep_label: str,
    sizes: Sequence[int],
    seed: int,
    p: float = SHM_P,
    dims: Sequence[int] = SHM_DIMS,
    omega_subset: Sequence[int] = (1, 2, 3, 4),
    max_dim: int | None = None,
) -> list[tuple[int, str, float, float]]:
    """Rows ``(size, label, wd_sum, scaled_wd)`` with ``sweep_label`` subsampled to each size."""
    if sweep_label not in table.groups:
        raise ValidationError(f"no partition named {sweep_label!r}")
    full = table[sweep_label]
    rng = np.random.default_rng(seed)
    dims = tuple(sorted(set(dims)))
    if max_dim is None:
        max_dim = max(dims) + 1
    base = partition_persistence(table, omega_subset, max_dim)
    out = []
    for size in sizes:
        size = int(size)
        if not 1 <= size <= len(full):
            raise ValidationError(f"size {size} outside 1..{len(full)} for {sweep_label!r}")
        if size == len(full):
            recs = full
        else:
            recs = [full[i] for i in np.sort(rng.choice(len(full), size, replace=False))]
        diags = dict(base)
        diags[sweep_label] = persistent_diagram(_cloud(recs, omega_subset), max_dim=max_dim)
        counts = {**table.nonempty().counts, sweep_label: size}
        rows = summed_scaled(wd_matrix(diags, p, dims), counts)
        out.extend((size, r.label, r.wd_sum, r.scaled_wd) for r in rows)
    return out


def write_sweep_csv(rows, dest) -> None:
    lines = ["size,label,wd_sum,scaled_wd"]
    lines += [f"{s},{lab},{fmt_float(w)},{fmt_float(c)}" for s, lab, w, c in rows]
    Path(dest).write_text("\n".join(lines) + "\n")


# ------------------------------------------------------------ I/O

def read_records_csv(source) -> list[FrequencyRecord]:
    """Rows of ``index,temperature,omega1..omegaN``; extra columns are ignored.

    A blank or non-numeric temperature is kept as None.
    """
    with open(source, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyInputError(f"{source}: empty file")
        names = [c.strip() for c in reader.fieldnames]
        omega_cols = sorted((c for c in names if c.startswith("omega") and c[5:].isdigit()), key=lambda c: int(c[5:]))
        if "index" not in names or "temperature" not in names or not omega_cols:
            raise ValidationError(f"{source}: header needs index, temperature and omega1.. columns")
        out = []
        for line, row in enumerate(reader, start=2):
            row = {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}
            try:
                t = float(row["temperature"]) if row["temperature"] else None
            except ValueError:
                t = None
            try:
                rec = FrequencyRecord(int(row["index"]), t, tuple(float(row[c]) for c in omega_cols))
            except (KeyError, ValueError) as exc:
                raise ValidationError(f"{source}:{line}: {exc}") from None
            out.append(rec)
    if not out:
        raise EmptyInputError(f"{source}: no records")
    return out


def write_records_csv(records: Sequence[FrequencyRecord], dest) -> None:
    width = len(records[0].omegas) if records else 4
    lines = ["index,temperature," + ",".join(f"omega{i + 1}" for i in range(width))]
    for r in records:
        t = "" if r.temperature is None else fmt_float(r.temperature)
        lines.append(f"{r.index},{t}," + ",".join(fmt_float(w) for w in r.omegas))
    Path(dest).write_text("\n".join(lines) + "\n")


# ------------------------------------------------------------ synthetic data

SYNTH_COUNTS = {FREEZING: 72, COLD: 67, WARM: 209, DAMAGE: 46}


def synthetic_records(seed: int, counts: Mapping[str, int] | None = None,
                      cfg: PartitionConfig = PartitionConfig()) -> list[FrequencyRecord]:
    """Z24-shaped stand-in data with four frequencies per record.

    Freezing, Cold and Warm each draw from one Gaussian cluster; Damage
    draws from an even mixture of two clusters.  Cluster centres sit near
    the Z24 frequency range (about 4, 5, 10 and 13 Hz).  The healthy
    records come first, then the damaged ones from the onset index on.
    """
    counts = dict(SYNTH_COUNTS if counts is None else counts)
    rng = np.random.default_rng(seed)
    base = np.array([4.0, 5.1, 9.8, 12.4])
    spread = 0.04
    centres = {FREEZING: base * 1.06, COLD: base * 1.02, WARM: base}
    temps = {FREEZING: (-8.0, cfg.freezing_max), COLD: (cfg.freezing_max, cfg.cold_max), WARM: (cfg.cold_max, 25.0)}
    healthy = []
    for lab in (FREEZING, COLD, WARM):
        pts = centres[lab] + spread * base * rng.standard_normal((counts[lab], 4)) / 4
        t = rng.uniform(*temps[lab], counts[lab])
        healthy.extend(zip(t, pts))
    order = rng.permutation(len(healthy))
    n_healthy = len(healthy)
    first = cfg.damage_start_index - n_healthy
    recs = [FrequencyRecord(first + i, float(healthy[j][0]), tuple(healthy[j][1])) for i, j in enumerate(order)]
    shift = np.array([0.93, 0.97])
    nd = counts[DAMAGE]
    which = rng.integers(0, 2, nd)
    dmg = base * shift[which, None] + spread * base * rng.standard_normal((nd, 4)) / 4
    t = rng.uniform(-5.0, 20.0, nd)
    recs += [FrequencyRecord(cfg.damage_start_index + i, float(t[i]), tuple(dmg[i])) for i in range(nd)]
    return recs
