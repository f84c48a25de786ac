"""Attractor point clouds: Lorenz and Rossler flows (fixed-step RK4) and the Henon map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DivergenceError, ValidationError
from .geometry import PointCloud

DIVERGENCE_BOUND = 1e6

DEFAULT_PARAMS = {
    "lorenz": {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0},
    "rossler": {"a": 0.2, "b": 0.2, "c": 5.7},
    "henon": {"a": 1.4, "b": 0.3},
}
DEFAULT_INITIAL = {
    "lorenz": (1.0, 1.0, 1.0),
    "rossler": (0.0, 0.0, 0.0),
    "henon": (0.1, 0.3),
}
SYSTEMS = tuple(DEFAULT_PARAMS)

# Named sampling configurations.  The Rossler topology cloud keeps every
# 8th state (0.08 time units apart), which resolves the hole over the fold
# with 700 points; the sparse Lorenz run spans the dense run's time range.
PRESETS = {
    "lorenz-dense": {"system": "lorenz", "count": 10000, "stride": 1},
    "lorenz-sparse": {"system": "lorenz", "count": 1000, "stride": 10},
    "rossler-dimension": {"system": "rossler", "count": 20000, "stride": 10},
    "rossler-topology": {"system": "rossler", "count": 700, "stride": 8},
    "henon": {"system": "henon", "count": 2000},
}


def lorenz_rhs(s, sigma, rho, beta):
    x, y, z = s
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def rossler_rhs(s, a, b, c):
    x, y, z = s
    return np.array([-y - z, x + a * y, b + z * (x - c)])


_RHS = {"lorenz": lorenz_rhs, "rossler": rossler_rhs}


@dataclass(frozen=True)
class FlowSpec:
    system: str
    params: Mapping[str, float] = field(default_factory=dict)
    initial: tuple[float, ...] | None = None
    dt: float = 0.01
    transient_steps: int = 1000
    stride: int = 1
    count: int = 1000

    def __post_init__(self):
        if self.system not in _RHS:
            raise ValidationError(
                f"unknown flow {self.system!r}; valid systems: {', '.join(sorted(_RHS))}"
            )
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if self.stride < 1:
            raise ValidationError("stride must be >= 1")
        if self.count < 1:
            raise ValidationError("count must be >= 1")
        if self.transient_steps < 0:
            raise ValidationError("transient_steps must be >= 0")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.system])
        if unknown:
            raise ValidationError(f"unknown parameters for {self.system}: {sorted(unknown)}")
        merged = {**DEFAULT_PARAMS[self.system], **{k: float(v) for k, v in self.params.items()}}
        object.__setattr__(self, "params", merged)
        init = DEFAULT_INITIAL[self.system] if self.initial is None else tuple(map(float, self.initial))
        if len(init) != 3:
            raise ValidationError("flows need a 3-component initial state")
        object.__setattr__(self, "initial", init)


@dataclass(frozen=True)
class MapSpec:
    params: Mapping[str, float] = field(default_factory=dict)
    initial: tuple[float, float] = (0.1, 0.3)
    transient_steps: int = 0
    count: int = 2000

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError("count must be >= 1")
        if self.transient_steps < 0:
            raise ValidationError("transient_steps must be >= 0")
        unknown = set(self.params) - {"a", "b"}
        if unknown:
            raise ValidationError(f"unknown parameters for henon: {sorted(unknown)}")
        object.__setattr__(self, "params", {**DEFAULT_PARAMS["henon"], **self.params})
        if len(self.initial) != 2:
            raise ValidationError("the Henon map needs a 2-component initial state")


def rk4_step(f, s, dt, args):
    k1 = f(s, *args)
    k2 = f(s + 0.5 * dt * k1, *args)
    k3 = f(s + 0.5 * dt * k2, *args)
    k4 = f(s + dt * k3, *args)
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(system: str, params: Mapping[str, float], initial, dt: float, steps: int) -> np.ndarray:
    """All ``steps + 1`` RK4 states starting from ``initial``."""
    f = _RHS[system]
    p = {**DEFAULT_PARAMS[system], **params}
    args = tuple(p[k] for k in DEFAULT_PARAMS[system])
    out = np.empty((steps + 1, 3))
    s = np.asarray(initial, dtype=float)
    out[0] = s
    for i in range(1, steps + 1):
        s = rk4_step(f, s, dt, args)
        if not np.all(np.isfinite(s)) or np.max(np.abs(s)) > DIVERGENCE_BOUND:
            raise DivergenceError(f"{system} orbit blew up at step {i}")
        out[i] = s
    return out


def generate_flow(spec: FlowSpec) -> PointCloud:
    """Integrate, drop the transient, keep every ``stride``-th state."""
    steps = spec.transient_steps + (spec.count - 1) * spec.stride
    traj = integrate(spec.system, spec.params, spec.initial, spec.dt, steps)
    return PointCloud(traj[spec.transient_steps :: spec.stride][: spec.count])


def generate_henon(spec: MapSpec) -> PointCloud:
    a, b = spec.params["a"], spec.params["b"]
    x, y = map(float, spec.initial)
    total = spec.transient_steps + spec.count
    out = np.empty((spec.count, 2))
    for i in range(total):
        x, y = 1.0 - a * x * x + y, b * x
        if not (abs(x) <= DIVERGENCE_BOUND and abs(y) <= DIVERGENCE_BOUND):
            raise DivergenceError(f"Henon orbit diverged at iterate {i + 1}")
        if i >= spec.transient_steps:
            out[i - spec.transient_steps] = (x, y)
    return PointCloud(out)


def generate(system: str, count: int, **kw) -> PointCloud:
    """Dispatch on system name; ``kw`` are spec fields."""
    if system == "henon":
        kw.pop("dt", None)
        kw.pop("stride", None)
        return generate_henon(MapSpec(count=count, **kw))
    if system not in _RHS:
        raise ValidationError(f"unknown system {system!r}; valid systems: {', '.join(SYSTEMS)}")
    return generate_flow(FlowSpec(system, count=count, **kw))
