import itertools
import math

import numpy as np
import pytest

from oracles import enclosing_radius_loop, pairwise_loop, vr_simplices
from tdakit.errors import ResourceError, StructuralError, ValidationError
from tdakit.filtration import (
    Filtration, Simplex, build_vr_filtration, complex_at_scale, enclosing_radius,
)
from tdakit.geometry import DistanceMatrix, PointCloud, build_distance_matrix


def _square():
    return PointCloud([[0, 0], [1, 0], [1, 1], [0, 1]])


def test_square_counts():
    f = build_vr_filtration(_square(), max_dim=2, max_scale=math.inf)
    dims = [s.dimension for s in f]
    assert dims.count(0) == 4 and dims.count(1) == 6 and dims.count(2) == 4
    assert complex_at_scale(f, 1.0) == (4, 4, 0)
    assert complex_at_scale(f, 1.5) == (4, 6, 4)


def test_enclosing_radius_default_truncates():
    m = build_distance_matrix(_square())
    assert enclosing_radius(m) == pytest.approx(math.sqrt(2))
    f = build_vr_filtration(m)
    assert f.max_scale == enclosing_radius(m)
    assert max(s.value for s in f) <= f.max_scale


@pytest.mark.parametrize("seed", range(15))
def test_matches_brute_force_enumeration(seed):
    rng = np.random.default_rng(seed)
    x = rng.random((int(rng.integers(2, 9)), 2))
    d = pairwise_loop(x)
    for scale in (math.inf, enclosing_radius_loop(d), 0.4):
        f = build_vr_filtration(DistanceMatrix(d), max_dim=3, max_scale=scale)
        got = sorted((s.vertices, s.value) for s in f)
        want = sorted(vr_simplices(d, 3, scale))
        assert [g[0] for g in got] == [w[0] for w in want]
        assert np.allclose([g[1] for g in got], [w[1] for w in want], atol=1e-12)
        f.check_face_closure()


def test_order_is_value_then_dimension():
    f = build_vr_filtration(_square(), max_dim=2, max_scale=math.inf)
    keys = [s.sort_key() for s in f]
    assert keys == sorted(keys)


def test_face_closure_violation_detected():
    bad = Filtration((Simplex((0,), 0.0), Simplex((0, 1), 1.0), Simplex((1,), 0.0)), 1, math.inf, 2)
    with pytest.raises(StructuralError):
        bad.check_face_closure()


def test_budget_and_dimension_limits():
    x = np.random.default_rng(0).random((30, 2))
    with pytest.raises(ResourceError):
        build_vr_filtration(PointCloud(x), max_dim=3, max_scale=math.inf, budget=1000)
    with pytest.raises(ValidationError):
        build_vr_filtration(PointCloud(x), max_dim=4)
    with pytest.raises(ValidationError):
        build_vr_filtration(PointCloud(x), max_scale=-1.0)


def test_closed_threshold_includes_equal_edge():
    f = build_vr_filtration(PointCloud([[0.0], [1.0]]), max_dim=1, max_scale=1.0)
    assert any(s.vertices == (0, 1) for s in f)


def test_write_csv(tmp_path):
    f = build_vr_filtration(_square(), max_dim=1, max_scale=1.0)
    p = tmp_path / "f.csv"
    f.write_csv(p)
    lines = p.read_text().splitlines()
    assert lines[0] == "value,dim,vertices"
    assert lines[1] == "0.0,0,0"
    assert len(lines) == 1 + 4 + 4
    for (a, b) in itertools.combinations(range(2), 2):
        assert f"1.0,1,{a},{b}" in lines
