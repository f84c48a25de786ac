import numpy as np
import pytest

from tdakit.errors import EmptyInputError, ValidationError
from tdakit.shm import (
    COLD, DAMAGE, FREEZING, WARM, FrequencyRecord, PartitionConfig, analyze_partitions,
    partition_persistence, partition_records, partition_size_sweep, read_records_csv,
    split_partition, synthetic_records, write_records_csv, write_sweep_csv,
)

W = (4.0, 5.0, 10.0, 12.0)


def R(i, t):
    return FrequencyRecord(i, t, W)


def test_labels_and_boundaries():
    cfg = PartitionConfig()
    assert cfg.label(R(10, -5)) == FREEZING
    assert cfg.label(R(10, 2)) == COLD
    assert cfg.label(R(10, 10)) == WARM
    assert cfg.label(R(3500, 10)) == DAMAGE
    assert cfg.label(R(10, 0.0)) == COLD
    assert cfg.label(R(10, 4.0)) == WARM
    assert cfg.label(R(3475, -20)) == DAMAGE
    assert cfg.label(R(3474, -20)) == FREEZING
    assert cfg.label(R(10, None)) is None


def test_partition_is_exhaustive_and_disjoint():
    recs = synthetic_records(0)
    recs.insert(5, FrequencyRecord(-1, None, W))
    recs.sort(key=lambda r: r.index)
    t = partition_records(recs)
    assert t.skipped == 1
    seen = [r.index for lab in t.labels for r in t[lab]]
    assert len(seen) == len(set(seen)) == len(recs) - 1
    assert sum(t.counts.values()) == len(recs) - 1


def test_partition_validation():
    with pytest.raises(EmptyInputError):
        partition_records([])
    with pytest.raises(ValidationError):
        partition_records([R(2, 1), R(1, 1)])
    with pytest.raises(ValidationError):
        PartitionConfig(5, 4)
    with pytest.raises(ValidationError):
        FrequencyRecord(1, 0, (1.0, -2.0))


def test_split_sizes_and_determinism():
    recs = [R(i, 10) for i in range(2089)]
    t = partition_records(recs)
    a = split_partition(t, WARM, [0.5, 0.5], seed=7)
    b = split_partition(t, WARM, [0.5, 0.5], seed=7)
    assert sorted([a.counts["Warm1"], a.counts["Warm2"]]) == [1044, 1045]
    assert a.counts[WARM] == 2089
    assert [r.index for r in a["Warm1"]] == [r.index for r in b["Warm1"]]
    assert not {r.index for r in a["Warm1"]} & {r.index for r in a["Warm2"]}
    assert a.provenance["Warm1"] == {"parent": WARM, "seed": 7, "fractions": [0.5, 0.5]}
    one = split_partition(t, WARM, [1.0], seed=1, names=["Copy"])
    assert [r.index for r in one["Copy"]] == [r.index for r in t[WARM]]
    with pytest.raises(ValidationError):
        split_partition(partition_records([R(1, 10)]), WARM, [0.5, 0.5], seed=0)
    with pytest.raises(ValidationError):
        split_partition(t, WARM, [0.3, 0.3], seed=0)


def test_single_record_partitions_give_zero_wd():
    recs = [R(1, -3), R(2, 2), R(3, 10), R(3476, 5)]
    res = analyze_partitions(partition_records(recs))
    assert np.all(res.distances.matrix == 0)


def test_omega_subset_checked():
    t = partition_records(synthetic_records(1))
    with pytest.raises(ValidationError):
        partition_persistence(t, (1, 5))
    d = partition_persistence(t, (1, 3, 4))
    assert set(d) == {FREEZING, COLD, WARM, DAMAGE}


def test_threads_do_not_change_results():
    t = partition_records(synthetic_records(2))
    a = partition_persistence(t, threads=1)
    b = partition_persistence(t, threads=3)
    assert all(a[k].equals(b[k]) for k in a)


def test_duplicating_records_halves_scaled_wd():
    t = partition_records(synthetic_records(3))
    base = analyze_partitions(t)
    dup = t.with_group(COLD, [r for r in t[COLD] for _ in (0, 1)])
    again = analyze_partitions(dup)
    b = {r.label: r for r in base.rows}
    a = {r.label: r for r in again.rows}
    assert a[COLD].wd_sum == pytest.approx(b[COLD].wd_sum, rel=1e-12)
    assert a[COLD].scaled_wd == pytest.approx(b[COLD].scaled_wd / 2, rel=1e-12)
    others = [k for k in b if k != COLD]
    assert sorted(others, key=lambda k: b[k].scaled_wd) == sorted(others, key=lambda k: a[k].scaled_wd)


def test_size_sweep_full_size_matches_unswept(tmp_path):
    t = partition_records(synthetic_records(4))
    n = t.counts[WARM]
    rows = partition_size_sweep(t, WARM, [40, n], seed=0)
    full = {r.label: r for r in analyze_partitions(t).rows}
    last = [r for r in rows if r[0] == n]
    for size, lab, s, c in last:
        assert s == pytest.approx(full[lab].wd_sum, rel=1e-12)
        assert c == pytest.approx(full[lab].scaled_wd, rel=1e-12)
    write_sweep_csv(rows, tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().startswith("size,label,wd_sum,scaled_wd\n40,")
    with pytest.raises(ValidationError):
        partition_size_sweep(t, WARM, [n + 1], seed=0)


def test_records_csv_roundtrip(tmp_path):
    recs = synthetic_records(5)[:20] + [FrequencyRecord(99999, None, W)]
    p = tmp_path / "z.csv"
    write_records_csv(recs, p)
    back = read_records_csv(p)
    assert back == recs
    p.write_text("index,temperature,humidity,omega1,omega2\n1,3.5,80,4.0,5.0\n2,,81,4.1,5.1\n")
    r = read_records_csv(p)
    assert r[0].omegas == (4.0, 5.0) and r[1].temperature is None
    p.write_text("index,temp\n1,2\n")
    with pytest.raises(ValidationError):
        read_records_csv(p)
