import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tdakit.embedding import (
    DelaySpec, delay_embed, even_subsample, optimal_delay, pca_fit, pca_transform, pick_optimal,
)
from tdakit.errors import SweepShapeError, ValidationError
from tdakit.geometry import PointCloud, build_distance_matrix
from tdakit.persistence import persistent_diagram


def test_delay_embed_example():
    c = delay_embed([0, 1, 2, 3, 4, 5], DelaySpec(2, 2))
    assert c.points.tolist() == [[0, 2], [1, 3], [2, 4], [3, 5]]
    assert delay_embed(range(5), DelaySpec(2, 3)).count == 1
    with pytest.raises(ValidationError, match="at least 7"):
        delay_embed(range(6), DelaySpec(3, 3))
    with pytest.raises(ValidationError):
        DelaySpec(0, 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(10, 60), st.integers(1, 5), st.integers(1, 4))
def test_embed_count(n, a, d):
    if (d - 1) * a + 1 > n:
        return
    assert delay_embed(np.arange(n, dtype=float), DelaySpec(a, d)).count == n - (d - 1) * a


def test_sine_quarter_period_is_a_circle():
    t = np.arange(1000)
    x = np.sin(2 * np.pi * t / 100)
    cloud = delay_embed(x, DelaySpec(25, 2))
    d = persistent_diagram(even_subsample(cloud, 200))
    per = np.sort(d.persistence(1))[::-1]
    diam = build_distance_matrix(cloud.subset(range(100))).entries.max()
    assert per[0] > diam / 2
    assert len(per) == 1 or per[1] < diam / 2


def test_even_subsample():
    c = PointCloud(np.arange(10.0))
    assert even_subsample(c, 4).points.ravel().tolist() == [0, 3, 6, 9]
    assert even_subsample(c, 20) is c


def test_peak_rules():
    delays = list(range(1, 8))
    assert pick_optimal(delays, [1, 3, 2, 2, 1, 4, 5]) == (2, 5)
    assert pick_optimal(delays, [1, 3, 3, 2, 4, 1, 5]) == (5, 6)  # a plateau is not a strict peak
    assert pick_optimal(delays, [1, 3, 1, 2, 1, 4, 5]) == (2, 3)  # tied minima go to the smaller delay
    with pytest.raises(SweepShapeError):
        pick_optimal(delays, [1, 2, 3, 4, 5, 6, 7])


def test_constant_series_has_no_peak():
    ref = persistent_diagram(PointCloud(np.random.default_rng(0).random((20, 2))))
    with pytest.raises(SweepShapeError):
        optimal_delay(np.ones(50), 3, range(1, 6), ref)


def test_reference_from_sweep_is_recovered():
    t = np.arange(400)
    x = np.sin(2 * np.pi * t / 40) + 0.5 * np.sin(2 * np.pi * t / 13)
    star = 9
    ref = persistent_diagram(even_subsample(delay_embed(x, DelaySpec(star, 3)), 150), max_dim=2)
    res = optimal_delay(x, 3, range(1, 16), ref, subsample=150)
    assert res.wd[res.delays.index(star)] == 0.0
    if res.first_peak < star:
        assert res.optimal == star
    assert res.optimal > res.first_peak


def test_sweep_exports(tmp_path):
    t = np.arange(300)
    x = np.sin(2 * np.pi * t / 30)
    ref = persistent_diagram(delay_embed(x, DelaySpec(7, 2)))
    res = optimal_delay(x, 2, range(1, 12), ref, subsample=100)
    res.write_csv(tmp_path / "w.csv")
    res.write_json(tmp_path / "w.json")
    assert (tmp_path / "w.csv").read_text().startswith("alpha,wd\n1,")
    assert '"first_peak"' in (tmp_path / "w.json").read_text()


def test_pca_line_and_axes():
    x = np.linspace(-1, 1, 50)
    p = pca_fit(PointCloud(np.c_[x, 2 * x]), 2)
    assert p.components[0] == pytest.approx(np.array([1, 2]) / np.sqrt(5))
    assert p.explained_variance[1] == pytest.approx(0, abs=1e-12)
    rng = np.random.default_rng(0)
    y = rng.standard_normal((500, 2)) * [3, 1]
    q = pca_fit(PointCloud(y), 2)
    assert np.allclose(np.abs(q.components), np.eye(2), atol=0.05)
    with pytest.raises(ValidationError):
        pca_fit(PointCloud(y), 3)
    with pytest.raises(ValidationError):
        pca_transform(q, PointCloud(np.zeros((3, 3))))


@settings(max_examples=40, deadline=None)
@given(arrays(float, st.tuples(st.integers(3, 12), st.integers(2, 4)), elements=st.floats(-10, 10)))
def test_pca_invariants(x):
    c = PointCloud(x)
    full = pca_fit(c, c.dim)
    comps = full.components
    assert np.allclose(comps @ comps.T, np.eye(c.dim), atol=1e-9)
    assert np.all(np.diff(full.explained_variance) <= 1e-12)
    y = pca_transform(full, c)
    assert np.allclose(build_distance_matrix(y).entries, build_distance_matrix(c).entries, atol=1e-9)
    assert y.points.var(axis=0, ddof=1).sum() == pytest.approx(full.explained_variance.sum(), abs=1e-8)
    low = pca_transform(pca_fit(c, 1), c)
    assert np.all(build_distance_matrix(low).entries <= build_distance_matrix(c).entries + 1e-9)
