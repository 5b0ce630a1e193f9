"""Synthetic test objectives, a noise wrapper and a random-search baseline."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .optimizer import EvalRecord, RunTrace

_BOX_TOL = 1e-9


@dataclass(frozen=True)
class ObjectiveSpec:
    """A box-constrained objective and its affine map to the unit cube.

    Calling the spec evaluates at a raw point; :meth:`unit` evaluates at a
    unit-cube point.
    """

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    evaluator: Callable[[np.ndarray], float]
    known_optimum: Optional[float] = None
    optimum_point: Optional[np.ndarray] = None

    def to_raw(self, u):
        return self.lower + (self.upper - self.lower) * np.asarray(u, dtype=float)

    def to_unit(self, x):
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def __call__(self, x) -> float:
        return self.evaluator(np.asarray(x, dtype=float))

    def unit(self, u) -> float:
        return self.evaluator(self.to_raw(u))


def _check_box(x, lower, upper, name):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != np.shape(lower)[0]:
        raise ValueError(f"{name}: expected a point of dimension {np.shape(lower)[0]}, got shape {x.shape}")
    tol = _BOX_TOL * (np.asarray(upper) - np.asarray(lower))
    if not np.all(np.isfinite(x)) or np.any(x < lower - tol) or np.any(x > upper + tol):
        raise ValueError(f"{name}: point outside the domain box")
    return x


def _ackley(x):
    a, b, c = 20.0, 0.2, 2.0 * np.pi
    d = x.shape[0]
    s1 = np.sqrt(np.sum(x * x) / d)
    s2 = np.sum(np.cos(c * x)) / d
    return float(-a * np.exp(-b * s1) - np.exp(s2) + a + np.e)


def _levy(x):
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[0]) ** 2
    mid = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:-1] + 1.0) ** 2))
    tail = (w[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[-1]) ** 2)
    return float(head + mid + tail)


def _rastrigin(x):
    return float(10.0 * x.shape[0] + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


_H6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_H6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
_H6_P = 1e-4 * np.array([
    [1312, 1696, 5569, 124, 8283, 5886],
    [2329, 4135, 8307, 3736, 1004, 9991],
    [2348, 1451, 3522, 2883, 3047, 6650],
    [4047, 8828, 8732, 5743, 1091, 381],
])
HARTMANN6_MINIMIZER = np.array([0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573])
HARTMANN6_MINIMUM = -3.32237


def _hartmann6(x):
    inner = np.sum(_H6_A * (x - _H6_P) ** 2, axis=1)
    return float(-np.sum(_H6_ALPHA * np.exp(-inner)))


def ackley(x, lower=-5.0, upper=10.0):
    """Ackley function (a=20, b=0.2, c=2*pi); minimum 0 at the origin."""
    x = _check_box(x, np.full(np.size(x), lower), np.full(np.size(x), upper), "ackley")
    return _ackley(x)


def levy(x, lower=-5.0, upper=10.0):
    """Levy function; minimum 0 at (1, ..., 1)."""
    x = _check_box(x, np.full(np.size(x), lower), np.full(np.size(x), upper), "levy")
    return _levy(x)


def rastrigin(x, lower=-3.0, upper=4.0):
    """Rastrigin function (A=10); minimum 0 at the origin."""
    x = _check_box(x, np.full(np.size(x), lower), np.full(np.size(x), upper), "rastrigin")
    return _rastrigin(x)


def hartmann6(x):
    """Six-dimensional Hartmann function on the unit cube."""
    x = _check_box(x, np.zeros(6), np.ones(6), "hartmann6")
    return _hartmann6(x)


def _make(name, dim, lo, hi, raw_fn, optimum, opt_point):
    lower = np.full(dim, float(lo))
    upper = np.full(dim, float(hi))

    def evaluator(x):
        return raw_fn(_check_box(x, lower, upper, name))

    return ObjectiveSpec(name, dim, lower, upper, evaluator, optimum, opt_point)


def make_ackley(dim=10):
    return _make("ackley", dim, -5.0, 10.0, _ackley, 0.0, np.zeros(dim))


def make_levy(dim=10):
    return _make("levy", dim, -5.0, 10.0, _levy, 0.0, np.ones(dim))


def make_rastrigin(dim=10):
    return _make("rastrigin", dim, -3.0, 4.0, _rastrigin, 0.0, np.zeros(dim))


def make_hartmann6(dim=6):
    if dim != 6:
        raise ValueError("hartmann6 is only defined for dim=6")
    return _make("hartmann6", 6, 0.0, 1.0, _hartmann6, HARTMANN6_MINIMUM, HARTMANN6_MINIMIZER.copy())


REGISTRY = {
    "ackley": make_ackley,
    "levy": make_levy,
    "rastrigin": make_rastrigin,
    "hartmann6": make_hartmann6,
}

DEFAULT_DIMS = {"ackley": 10, "levy": 10, "rastrigin": 10, "hartmann6": 6}


def get_objective(name: str, dim: int | None = None) -> ObjectiveSpec:
    """Look up a benchmark by name; ``dim`` defaults to the usual setting."""
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown objective {name!r}; choose from {sorted(REGISTRY)}") from None
    return factory(DEFAULT_DIMS[name] if dim is None else int(dim))


def noisy(objective: ObjectiveSpec, sigma: float, rng) -> ObjectiveSpec:
    """Add i.i.d. ``N(0, sigma^2)`` noise to every evaluation."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return objective
    base = objective.evaluator

    def evaluator(x):
        return base(x) + sigma * rng.standard_normal()

    return replace(objective, name=f"{objective.name}+noise", evaluator=evaluator)


def random_search(objective: ObjectiveSpec, budget: int, rng) -> RunTrace:
    """Uniform i.i.d. sampling of the box; points are stored in unit coordinates."""
    if budget < 1:
        raise ValueError("budget must be positive")
    U = rng.random((budget, objective.dim))
    trace = RunTrace()
    for k, u in enumerate(U):
        trace.records.append(EvalRecord(k, u, float(objective.unit(u)), -1, float("nan"), 0, k))
    return trace
