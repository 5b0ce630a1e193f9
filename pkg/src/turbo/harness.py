"""Replicated experiments: config files, trace/summary CSVs, batch-size study."""

from __future__ import annotations

import configparser
import dataclasses
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .benchmarks import get_objective, noisy, random_search
from .exceptions import ConfigError
from .optimizer import RunTrace, Turbo, TurboConfig

log = logging.getLogger(__name__)

ALGORITHMS = ("turbo", "random-search")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of a replicated experiment.

    Replicate ``r`` is seeded with ``seed + r``.
    """

    objective: str = "ackley"
    dim: int | None = None
    algorithm: str = "turbo"
    num_regions: int = 1
    batch_size: int = 10
    max_evaluations: int = 500
    init_points: int = 20
    replications: int = 1
    seed: int = 0
    noise_sigma: float = 0.0
    output_dir: str = "results"
    fit_budget: int = 50
    workers: int = 1

    def validate(self) -> ExperimentConfig:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            self.objective_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.algorithm == "turbo":
            self.turbo_config(0)
        elif self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be positive")
        return self

    def objective_spec(self):
        return get_objective(self.objective, self.dim)

    def turbo_config(self, replicate: int) -> TurboConfig:
        spec = self.objective_spec()
        return TurboConfig(
            dim=spec.dim,
            num_regions=self.num_regions,
            batch_size=self.batch_size,
            max_evaluations=self.max_evaluations,
            init_points_per_region=self.init_points,
            noisy=self.noise_sigma > 0,
            seed=self.seed + replicate,
            fit_budget=self.fit_budget,
        )


_FIELD_TYPES = {
    "objective": str, "dim": int, "algorithm": str, "num_regions": int,
    "batch_size": int, "max_evaluations": int, "init_points": int,
    "replications": int, "seed": int, "noise_sigma": float,
    "output_dir": str, "fit_budget": int, "workers": int,
}
# short spellings accepted in config files and on the command line
_ALIASES = {"m": "num_regions", "q": "batch_size", "budget": "max_evaluations", "sigma": "noise_sigma"}


def coerce_settings(raw: dict) -> dict:
    """Convert string settings to typed ExperimentConfig keyword arguments."""
    out = {}
    for key, value in raw.items():
        key = _ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        if value is None:
            continue
        if isinstance(value, str):
            value = value.strip().strip('"').strip("'")
            if key == "dim" and value.lower() in ("", "none", "default"):
                out[key] = None
                continue
        try:
            out[key] = _FIELD_TYPES[key](value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return out


def load_config(path, overrides=None) -> ExperimentConfig:
    """Read a flat ``key = value`` file; ``overrides`` win over file values.

    Lines starting with ``#`` or ``;`` are comments.
    """
    settings = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string("[experiment]\n" + text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        settings.update(parser["experiment"])
    settings.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig(**coerce_settings(settings)).validate()


def dump_config(config: ExperimentConfig) -> str:
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        lines.append(f"{f.name} = {'default' if value is None else value}")
    return "\n".join(lines) + "\n"


def run_replicate(config: ExperimentConfig, replicate: int) -> RunTrace:
    """Run one replicate; trace points are in unit-cube coordinates."""
    spec = config.objective_spec()
    seed = config.seed + replicate
    if config.noise_sigma > 0:
        spec = noisy(spec, config.noise_sigma, np.random.default_rng([seed, 1]))
    if config.algorithm == "random-search":
        return random_search(spec, config.max_evaluations, np.random.default_rng(seed))
    return Turbo(config.turbo_config(replicate)).run(spec.unit)


def _run_replicate_args(args):
    return run_replicate(*args)


def run_replicates(config: ExperimentConfig) -> list:
    jobs = [(config, r) for r in range(config.replications)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_run_replicate_args, jobs))
    return [run_replicate(*job) for job in jobs]


def summarize(best_curves) -> tuple:
    """Mean and standard error across replicates, per evaluation index.

    ``best_curves`` is (replicates, evaluations). The standard error is
    the sample standard deviation over sqrt(replicates); NaN for a single
    replicate.
    """
    B = np.asarray(best_curves, dtype=float)
    mean = B.mean(axis=0)
    if B.shape[0] < 2:
        return mean, np.full_like(mean, np.nan)
    return mean, B.std(axis=0, ddof=1) / np.sqrt(B.shape[0])


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_trace(path, trace: RunTrace, spec) -> None:
    d = spec.dim
    header = ["eval_index", *[f"x{i}" for i in range(d)], "value", "best_so_far", "tr_id", "base_length", "restart_gen"]
    best = trace.best_so_far
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for rec, b in zip(trace.records, best):
            raw = spec.to_raw(rec.point)
            row = [str(rec.index), *map(_fmt, raw), _fmt(rec.value), _fmt(b), str(rec.tr_id), _fmt(rec.base_length), str(rec.restart_gen)]
            fh.write(",".join(row) + "\n")


def write_summary(path, mean, stderr, index_name="eval_index", index=None) -> None:
    index = np.arange(len(mean)) if index is None else index
    with open(path, "w") as fh:
        fh.write(f"{index_name},mean_best,stderr_best\n")
        for k, m, s in zip(index, mean, stderr):
            fh.write(f"{int(k)},{_fmt(m)},{_fmt(s)}\n")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    traces: list
    mean_best: np.ndarray
    stderr_best: np.ndarray

    @property
    def final_best(self) -> np.ndarray:
        return np.array([t.best_value for t in self.traces])


def _prepare_output(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    return out


def run_experiment(config: ExperimentConfig, write=True) -> ExperimentResult:
    """Run every replicate, then write ``trace_XXX.csv`` files and ``summary.csv``."""
    config.validate()
    out = _prepare_output(config.output_dir) if write else None
    traces = run_replicates(config)
    mean, stderr = summarize([t.best_so_far for t in traces])
    if write:
        spec = config.objective_spec()
        for r, trace in enumerate(traces):
            write_trace(out / f"trace_{r:03d}.csv", trace, spec)
        write_summary(out / "summary.csv", mean, stderr)
        (out / "config.cfg").write_text(dump_config(config))
        log.info("wrote %d traces to %s", len(traces), out)
    return ExperimentResult(config, traces, mean, stderr)


def best_by_batch(trace: RunTrace) -> np.ndarray:
    """Best value seen after each completed batch (design batches included)."""
    best = trace.best_so_far
    batches = trace.batches
    last = np.flatnonzero(np.r_[batches[1:] != batches[:-1], True])
    return best[last]


@dataclass
class BatchStudyResult:
    q: int
    budget: int
    by_eval: ExperimentResult
    batch_mean: np.ndarray
    batch_stderr: np.ndarray


def study_budget(q: int, floor_budget: int = 6400) -> int:
    return max(200 * q, floor_budget)


def batch_study(config: ExperimentConfig, q_list, floor_budget: int = 6400, write=True) -> dict:
    """Run the same experiment for each batch size in ``q_list``.

    Each batch size gets ``max(200 q, floor_budget)`` evaluations. For every
    q two summaries are produced: best value against evaluation count
    (``q{q}/summary.csv``) and against batch count
    (``q{q}/summary_by_batch.csv``). By-batch curves are cut to the shortest
    replicate, as restarts change the number of batches.
    """
    q_list = [int(q) for q in q_list]
    if not q_list:
        raise ConfigError("q_list must not be empty")
    results = {}
    for q in q_list:
        budget = study_budget(q, floor_budget)
        sub = dataclasses.replace(
            config, batch_size=q, max_evaluations=budget, output_dir=str(Path(config.output_dir) / f"q{q}")
        )
        res = run_experiment(sub, write=write)
        curves = [best_by_batch(t) for t in res.traces]
        n = min(len(c) for c in curves)
        bmean, bse = summarize([c[:n] for c in curves])
        if write:
            write_summary(Path(sub.output_dir) / "summary_by_batch.csv", bmean, bse, "batch_index", np.arange(1, n + 1))
        results[q] = BatchStudyResult(q, budget, res, bmean, bse)
    return results
