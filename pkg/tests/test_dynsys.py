import numpy as np
import pytest

from tdakit.dynsys import (
    DEFAULT_PARAMS, FlowSpec, MapSpec, generate, generate_flow, generate_henon, integrate,
    lorenz_rhs, rossler_rhs,
)
from tdakit.errors import DivergenceError, ValidationError


def test_henon_first_iterate_and_identity():
    c = generate_henon(MapSpec(count=50))
    assert c.points[0] == pytest.approx([1.286, 0.03], abs=1e-15)
    x, y = c.points[:-1].T
    assert np.array_equal(c.points[1:, 0], 1 - 1.4 * x * x + y)
    assert np.array_equal(c.points[1:, 1], 0.3 * x)


def test_henon_degenerate_and_divergent():
    c = generate_henon(MapSpec({"a": 0.0, "b": 0.0}, (0.0, 0.0), count=3))
    assert c.points.tolist() == [[1, 0], [1, 0], [1, 0]]
    with pytest.raises(DivergenceError, match="iterate"):
        generate_henon(MapSpec({"a": 3.0}, (2.0, 0.0), count=100))


def test_rhs_at_known_points():
    assert rossler_rhs(np.zeros(3), **DEFAULT_PARAMS["rossler"]).tolist() == [0, 0, 0.2]
    assert lorenz_rhs(np.zeros(3), **DEFAULT_PARAMS["lorenz"]).tolist() == [0, 0, 0]
    c = generate_flow(FlowSpec("lorenz", initial=(0, 0, 0), count=5))
    assert np.all(c.points == 0)


def test_rk4_fourth_order():
    p = DEFAULT_PARAMS["lorenz"]
    s0 = (1.0, 1.0, 1.0)
    # successive differences at T = 1 shrink by 2**4 when dt halves
    s = [integrate("lorenz", p, s0, dt, int(round(1 / dt)))[-1] for dt in (0.002, 0.001, 0.0005)]
    ratio = np.linalg.norm(s[0] - s[1]) / np.linalg.norm(s[1] - s[2])
    assert 12 < ratio < 20


def test_stride_transient_and_determinism():
    a = generate_flow(FlowSpec("rossler", stride=8, count=100))
    b = generate_flow(FlowSpec("rossler", stride=8, count=100))
    assert np.array_equal(a.points, b.points)
    full = integrate("rossler", {}, (0, 0, 0), 0.01, 1000 + 99 * 8)
    assert np.array_equal(a.points, full[1000::8])


def test_spec_validation():
    with pytest.raises(ValidationError, match="valid systems"):
        FlowSpec("duffing")
    with pytest.raises(ValidationError):
        FlowSpec("lorenz", dt=0)
    with pytest.raises(ValidationError):
        FlowSpec("lorenz", stride=0)
    with pytest.raises(ValidationError):
        FlowSpec("lorenz", params={"gamma": 1})
    with pytest.raises(ValidationError):
        generate("nope", 10)


def test_blowup_reported():
    with pytest.raises(DivergenceError, match="step"):
        generate_flow(FlowSpec("lorenz", params={"rho": 1e9}, dt=1.0, count=50, transient_steps=0))


def test_generate_dispatch_shapes():
    assert generate("henon", 2000).points.shape == (2000, 2)
    assert generate("rossler", 700, stride=8).points.shape == (700, 3)
