"""Lifecycle of a single hyperrectangular trust region.

States are treated as values: every operation returns a new
:class:`TrustRegionState` and leaves its argument untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .candidates import latin_hypercube
from .exceptions import ContractViolation

ACTIVE = "active"
TERMINATED = "terminated"


@dataclass(frozen=True)
class TRConfig:
    """Resizing rule for trust regions (unit-cube lengths)."""

    tau_succ: int = 3
    tau_fail: int = 1
    l_min: float = 2.0**-7
    l_max: float = 1.6
    l_init: float = 0.8

    def __post_init__(self):
        if self.tau_succ < 1 or self.tau_fail < 1:
            raise ValueError("tolerances must be positive")
        if not (0 < self.l_min < self.l_init <= self.l_max):
            raise ValueError("need 0 < l_min < l_init <= l_max")

    @classmethod
    def default(cls, d: int, q: int, num_regions: int = 1) -> TRConfig:
        """Default tolerances; ``tau_fail = ceil(d / q)``.

        With several regions the per-region allocation varies from batch to
        batch, so the sequential tolerance (q = 1) is used instead.
        """
        q_eff = 1 if num_regions > 1 else q
        return cls(tau_fail=math.ceil(d / q_eff))


@dataclass(frozen=True)
class TrustRegionState:
    center: np.ndarray
    incumbent_value: float
    base_length: float
    success_count: int = 0
    failure_count: int = 0
    status: str = ACTIVE
    X: np.ndarray = field(default=None, repr=False)
    y: np.ndarray = field(default=None, repr=False)
    # raw value of the observation at the center; equals incumbent_value
    # in noise-free mode
    incumbent_raw: float = math.inf
    # Latin hypercube points awaiting evaluation after a restart
    pending: np.ndarray = field(default=None, repr=False)
    generation: int = 0
    # last fitted KernelParams (warm start) and number of fits so far
    params: object = field(default=None, repr=False)
    n_fits: int = 0

    def __post_init__(self):
        d = self.center.shape[0]
        if self.X is None:
            object.__setattr__(self, "X", np.empty((0, d)))
        if self.y is None:
            object.__setattr__(self, "y", np.empty(0))
        if self.pending is None:
            object.__setattr__(self, "pending", np.empty((0, d)))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def active(self) -> bool:
        return self.status == ACTIVE

    @property
    def n_obs(self) -> int:
        return self.y.shape[0]


def side_lengths(base_length: float, lengthscales) -> np.ndarray:
    """Per-dimension side lengths with product ``base_length ** d``."""
    lam = np.asarray(lengthscales, dtype=float)
    weights = lam / np.exp(np.mean(np.log(lam)))
    return base_length * weights


def region_bounds(state: TrustRegionState, lengthscales=None):
    """Intersection of the trust region with the unit cube.

    Isotropic when ``lengthscales`` is None.
    """
    if lengthscales is None:
        lengthscales = np.ones(state.dim)
    half = 0.5 * side_lengths(state.base_length, lengthscales)
    lower = np.clip(state.center - half, 0.0, 1.0)
    upper = np.clip(state.center + half, 0.0, 1.0)
    return lower, upper


def record_batch(state: TrustRegionState, improved: bool, points_assigned: int, config: TRConfig) -> TrustRegionState:
    """Update the success/failure counters after one batch and resize."""
    if not state.active:
        raise ContractViolation("record_batch called on a terminated trust region")
    if points_assigned < 1:
        raise ContractViolation("record_batch requires at least one assigned point")

    if improved:
        succ, fail = state.success_count + 1, 0
    else:
        succ, fail = 0, min(state.failure_count + points_assigned, config.tau_fail)

    length = state.base_length
    if succ >= config.tau_succ:
        length = min(config.l_max, 2.0 * length)
        succ = fail = 0
    elif fail >= config.tau_fail:
        length = length / 2.0
        succ = fail = 0

    status = TERMINATED if length < config.l_min else ACTIVE
    return replace(state, base_length=length, success_count=succ, failure_count=fail, status=status)


def add_observations(state: TrustRegionState, X, y) -> TrustRegionState:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    return replace(state, X=np.vstack([state.X, X]), y=np.concatenate([state.y, y]))


def update_center(state: TrustRegionState, model=None, noisy: bool = False) -> TrustRegionState:
    """Move the center to the incumbent observation.

    Noise-free: the best observed value (earliest on ties). Noisy: the
    observation with the smallest posterior mean under ``model``.
    """
    if state.n_obs < 1:
        raise ContractViolation("update_center needs at least one observation")
    if noisy:
        if model is None:
            raise ContractViolation("noisy center rule needs a fitted model")
        means = model.predict_mean(state.X)
        idx = int(np.argmin(means))
        value = float(means[idx])
    else:
        idx = int(np.argmin(state.y))
        value = float(state.y[idx])
    return replace(
        state,
        center=state.X[idx].copy(),
        incumbent_value=value,
        incumbent_raw=float(state.y[idx]),
    )


def restart(config: TRConfig, rng, init_design_size: int, d: int, generation: int = 0) -> TrustRegionState:
    """Fresh region whose Latin hypercube design is still unevaluated."""
    if init_design_size < 1:
        raise ValueError("init_design_size must be positive")
    return TrustRegionState(
        center=np.full(d, 0.5),
        incumbent_value=math.inf,
        base_length=config.l_init,
        pending=latin_hypercube(init_design_size, d, rng),
        generation=generation,
    )
