"""Benchmark test functions on discretized 2-D domains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


class DomainError(ValueError):
    pass


def sphere(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x ** 2, axis=-1)


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    a, b = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (b - a ** 2) ** 2 + (a - 1.0) ** 2, axis=-1)


def branin(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    b = 5.1 / (4 * math.pi ** 2)
    c = 5 / math.pi
    t = 1 / (8 * math.pi)
    return (x2 - b * x1 ** 2 + c * x1 - 6) ** 2 + 10 * (1 - t) * np.cos(x1) + 10


def booth(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return (x1 + 2 * x2 - 7) ** 2 + (2 * x1 + x2 - 5) ** 2


def cross_in_tray(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    inner = np.abs(np.sin(x1) * np.sin(x2)
                   * np.exp(np.abs(100 - np.sqrt(x1 ** 2 + x2 ** 2) / math.pi)))
    return -0.0001 * (inner + 1) ** 0.1


def holder_table(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return -np.abs(np.sin(x1) * np.cos(x2)
                   * np.exp(np.abs(1 - np.sqrt(x1 ** 2 + x2 ** 2) / math.pi)))


FUNCTIONS = {
    "sphere": sphere,
    "rosenbrock": rosenbrock,
    "branin": branin,
    "booth": booth,
    "cross_in_tray": cross_in_tray,
    "holder_table": holder_table,
}

# name -> (bounds, theta, noise_std)
DEFAULTS = {
    "sphere": (((-5.12, 5.12), (-5.12, 5.12)), 20.0, 2.0),
    "rosenbrock": (((-2.0, 2.0), (-2.0, 2.0)), 100.0, 30.0),
    "branin": (((-5.0, 10.0), (0.0, 15.0)), 100.0, 20.0),
    "booth": (((-10.0, 10.0), (-10.0, 10.0)), 500.0, 30.0),
    "cross_in_tray": (((-10.0, 10.0), (-10.0, 10.0)), -1.5, 0.01),
    "holder_table": (((-10.0, 10.0), (-10.0, 10.0)), -3.0, 0.3),
}


@dataclass(frozen=True)
class BenchmarkSpec:
    function: str
    resolution: int = 20
    bounds: tuple = field(default=None)
    theta: float = None
    noise_std: float = None

    def __post_init__(self):
        if self.function not in FUNCTIONS:
            raise ValueError(f"unknown test function {self.function!r}; "
                             f"choose from {sorted(FUNCTIONS)}")
        b, th, ns = DEFAULTS[self.function]
        if self.bounds is None:
            object.__setattr__(self, "bounds", b)
        else:
            object.__setattr__(self, "bounds", tuple(tuple(map(float, ab)) for ab in self.bounds))
        if self.theta is None:
            object.__setattr__(self, "theta", th)
        if self.noise_std is None:
            object.__setattr__(self, "noise_std", ns)
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise ValueError("grid resolution must be an integer >= 2")
        for lo, hi in self.bounds:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bad domain bounds {self.bounds}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def with_(self, **kw) -> "BenchmarkSpec":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return {"function": self.function, "resolution": self.resolution,
                "bounds": [list(b) for b in self.bounds], "theta": self.theta,
                "noise_std": self.noise_std}


def eval_true(spec: BenchmarkSpec, x):
    x = np.asarray(x, dtype=float)
    lo = np.array([b[0] for b in spec.bounds])
    hi = np.array([b[1] for b in spec.bounds])
    slack = 1e-12 * (hi - lo)
    if x.shape[-1] != spec.dim or np.any(x < lo - slack) or np.any(x > hi + slack):
        raise DomainError(f"input outside the {spec.function} domain {spec.bounds}")
    out = FUNCTIONS[spec.function](x)
    return float(out) if np.ndim(out) == 0 else out


def make_grid(spec: BenchmarkSpec) -> np.ndarray:
    """Row-major lattice with inclusive endpoints, shape ``(resolution**d, d)``."""
    axes = [np.linspace(lo, hi, spec.resolution) for lo, hi in spec.bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def normalize(spec: BenchmarkSpec, x) -> np.ndarray:
    """Map domain coordinates to the unit cube."""
    lo = np.array([b[0] for b in spec.bounds])
    hi = np.array([b[1] for b in spec.bounds])
    return (np.asarray(x, dtype=float) - lo) / (hi - lo)


def observe(spec: BenchmarkSpec, x, rng: np.random.Generator) -> float:
    f = eval_true(spec, x)
    return float(f + spec.noise_std * rng.standard_normal())
