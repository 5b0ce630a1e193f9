"""The multi-region optimization loop with an ask/tell interface.

Objectives are minimized over the unit cube ``[0, 1]^d``; map raw domains
with :class:`turbo.benchmarks.ObjectiveSpec` or your own affine transform.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import trust_region as tr
from .acquisition import select_batch
from .candidates import default_size, generate
from .exceptions import ConfigError, ContractViolation, NoActiveRegionError, ObjectiveError
from .gp import fit_hyperparameters

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TurboConfig:
    """Settings for one optimization run.

    ``tr_config`` defaults to :meth:`TRConfig.default` for ``dim``,
    ``batch_size`` and ``num_regions``. ``n_candidates`` defaults to
    ``min(100 * dim, 5000)``. ``fit_budget`` caps L-BFGS iterations per
    start when fitting hyperparameters. A region's first fit, and every
    ``multistart_every``-th fit after it, uses all three starts; the others
    only warm-start from the region's previous hyperparameters.
    """

    dim: int
    num_regions: int = 1
    batch_size: int = 10
    max_evaluations: int = 500
    init_points_per_region: int = 20
    tr_config: tr.TRConfig | None = None
    noisy: bool = False
    seed: int = 0
    n_candidates: int | None = None
    fit_budget: int = 50
    multistart_every: int = 10

    def __post_init__(self):
        for name in ("dim", "num_regions", "batch_size", "max_evaluations", "init_points_per_region", "multistart_every"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.num_regions * self.init_points_per_region >= self.max_evaluations:
            raise ConfigError("initial designs would consume the whole evaluation budget")
        if self.tr_config is None:
            object.__setattr__(
                self, "tr_config", tr.TRConfig.default(self.dim, self.batch_size, self.num_regions)
            )
        if self.n_candidates is None:
            object.__setattr__(self, "n_candidates", default_size(self.dim))


@dataclass(frozen=True)
class EvalRecord:
    index: int
    point: np.ndarray
    value: float
    tr_id: int
    base_length: float
    restart_gen: int
    batch: int


@dataclass
class RunTrace:
    """Per-evaluation log of a run, in evaluation order."""

    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def points(self) -> np.ndarray:
        return np.array([r.point for r in self.records])

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records], dtype=float)

    @property
    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.values)

    @property
    def best_value(self) -> float:
        return float(self.values.min())

    @property
    def best_point(self) -> np.ndarray:
        return self.records[int(np.argmin(self.values))].point

    @property
    def batches(self) -> np.ndarray:
        return np.array([r.batch for r in self.records], dtype=int)


@dataclass
class _Outstanding:
    points: np.ndarray
    assignment: np.ndarray
    models: dict
    is_design: bool


class Turbo:
    """Trust-region Bayesian optimizer over the unit cube (minimization).

    Use :meth:`run` for a whole closed-loop run, or drive it with
    :meth:`ask` / :meth:`tell`::

        opt = Turbo(TurboConfig(dim=10))
        while not opt.finished:
            X = opt.ask()
            opt.tell(X, [f(x) for x in X])
    """

    def __init__(self, config: TurboConfig):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.trace = RunTrace()
        self.n_batches = 0
        self._outstanding = None
        self.regions = [
            tr.restart(config.tr_config, self.rng, config.init_points_per_region, config.dim)
            for _ in range(config.num_regions)
        ]

    @property
    def n_evals(self) -> int:
        return len(self.trace)

    @property
    def remaining(self) -> int:
        return self.config.max_evaluations - self.n_evals

    @property
    def finished(self) -> bool:
        return self.remaining <= 0

    @property
    def has_pending_design(self) -> bool:
        return any(r.pending.shape[0] for r in self.regions)

    @property
    def best_value(self) -> float:
        return self.trace.best_value

    def ask(self) -> np.ndarray:
        """Propose the next batch (unit-cube points, one per row).

        Unevaluated Latin hypercube designs (initial or after a restart) are
        returned first, as a batch of their own.
        """
        if self._outstanding is not None:
            raise ContractViolation("ask called while a batch is still outstanding")
        if self.finished:
            raise ContractViolation("evaluation budget exhausted")
        if self.has_pending_design:
            pts, ids = [], []
            for i, reg in enumerate(self.regions):
                pts.append(reg.pending)
                ids.extend([i] * reg.pending.shape[0])
            points = np.vstack(pts)[: self.remaining]
            assignment = np.array(ids[: self.remaining])
            self._outstanding = _Outstanding(points, assignment, {}, True)
            return points.copy()

        cfg = self.config
        active = [i for i, reg in enumerate(self.regions) if reg.active]
        if not active:
            raise NoActiveRegionError("all trust regions terminated")
        models, csets = {}, []
        for i in active:
            reg = self.regions[i]
            multistart = reg.params is None or reg.n_fits % cfg.multistart_every == 0
            model = fit_hyperparameters(
                reg.X, reg.y, init=reg.params, budget=cfg.fit_budget, rng=self.rng, multistart=multistart
            )
            reg = replace(reg, params=model.params, n_fits=reg.n_fits + 1)
            if cfg.noisy:
                reg = tr.update_center(reg, model, noisy=True)
            self.regions[i] = reg
            lower, upper = tr.region_bounds(reg, model.params.lengthscales)
            csets.append(generate(lower, upper, reg.center, cfg.n_candidates, self.rng))
            models[i] = model
        q = min(cfg.batch_size, self.remaining)
        sel = select_batch([models[i] for i in active], csets, q, self.rng, region_ids=active)
        self._outstanding = _Outstanding(sel.points, sel.tr_assignment, models, False)
        return sel.points.copy()

    def tell(self, points, values) -> None:
        """Report objective values for the points returned by :meth:`ask`."""
        out = self._outstanding
        if out is None:
            raise ContractViolation("tell called without an outstanding ask")
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.asarray(values, dtype=float).ravel()
        if points.shape != out.points.shape or not np.array_equal(points, out.points):
            raise ContractViolation("tell must echo exactly the points returned by ask")
        if values.shape[0] != points.shape[0]:
            raise ContractViolation(f"expected {points.shape[0]} values, got {values.shape[0]}")
        if not np.all(np.isfinite(values)):
            raise ContractViolation("objective values must be finite")

        self._outstanding = None
        batch = self.n_batches
        self.n_batches += 1
        for x, v, i in zip(points, values, out.assignment):
            reg = self.regions[i]
            self.trace.records.append(
                EvalRecord(self.n_evals, x.copy(), float(v), int(i), reg.base_length, reg.generation, batch)
            )

        cfg = self.config
        for i in np.unique(out.assignment):
            sel = out.assignment == i
            reg = self.regions[i]
            if out.is_design:
                reg = replace(reg, pending=reg.pending[:0])
                reg = tr.add_observations(reg, points[sel], values[sel])
                self.regions[i] = tr.update_center(reg)
                continue
            improved = bool(values[sel].min() < reg.incumbent_raw)
            reg = tr.add_observations(reg, points[sel], values[sel])
            reg = tr.record_batch(reg, improved, int(sel.sum()), cfg.tr_config)
            reg = tr.update_center(reg, out.models[i], noisy=cfg.noisy)
            if not reg.active:
                log.debug("region %d terminated at generation %d", i, reg.generation)
                reg = tr.restart(
                    cfg.tr_config, self.rng, cfg.init_points_per_region, cfg.dim, reg.generation + 1
                )
            self.regions[i] = reg

    def _evaluate(self, objective, points):
        values = np.empty(points.shape[0])
        for k, x in enumerate(points):
            try:
                values[k] = float(objective(x))
            except Exception as exc:
                raise ObjectiveError(x, exc) from exc
        return values

    def _ask_tell(self, objective):
        points = self.ask()
        self.tell(points, self._evaluate(objective, points))

    def initialize(self, objective) -> None:
        """Evaluate every region's initial design."""
        while self.has_pending_design and not self.finished:
            self._ask_tell(objective)

    def step(self, objective) -> None:
        """One batch, followed by the designs of any regions it restarted."""
        if self.finished:
            return
        self._ask_tell(objective)
        self.initialize(objective)

    def run(self, objective) -> RunTrace:
        self.initialize(objective)
        while not self.finished:
            self.step(objective)
        return self.trace


def run(config: TurboConfig, objective) -> RunTrace:
    """Minimize ``objective`` over ``[0, 1]^dim`` and return the trace."""
    return Turbo(config).run(objective)
