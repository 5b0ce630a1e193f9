"""Command-line entry point: ``turbo run``, ``turbo batch-study``, ``turbo list``."""

from __future__ import annotations

import argparse
import logging
import sys

from .benchmarks import DEFAULT_DIMS, REGISTRY
from .exceptions import ConfigError, NumericalError
from .harness import ALGORITHMS, batch_study, load_config, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_experiment_args(p):
    p.add_argument("--config", "-c", help="flat key = value experiment file")
    p.add_argument("--objective", choices=sorted(REGISTRY))
    p.add_argument("--dim", type=int)
    p.add_argument("--algorithm", choices=ALGORITHMS)
    p.add_argument("--num-regions", "-m", type=int, dest="num_regions")
    p.add_argument("--batch-size", "-q", type=int, dest="batch_size")
    p.add_argument("--max-evaluations", type=int, dest="max_evaluations")
    p.add_argument("--init-points", type=int, dest="init_points", help="initial design size per region")
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    p.add_argument("--output-dir", "-o", dest="output_dir")
    p.add_argument("--fit-budget", type=int, dest="fit_budget")
    p.add_argument("--workers", type=int)


_OVERRIDE_KEYS = (
    "objective", "dim", "algorithm", "num_regions", "batch_size", "max_evaluations",
    "init_points", "replications", "seed", "noise_sigma", "output_dir", "fit_budget", "workers",
)


def build_parser():
    parser = argparse.ArgumentParser(prog="turbo", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a replicated experiment")
    _add_experiment_args(p_run)

    p_batch = sub.add_parser("batch-study", help="compare batch sizes at budget max(200q, floor)")
    _add_experiment_args(p_batch)
    p_batch.add_argument("--q-list", required=True, help="comma-separated batch sizes, e.g. 1,10,50")
    p_batch.add_argument("--floor-budget", type=int, default=6400)

    sub.add_parser("list", help="list available objectives")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "list":
        for name in sorted(REGISTRY):
            print(f"{name}\t(default dim {DEFAULT_DIMS[name]})")
        return EXIT_OK

    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
    try:
        config = load_config(args.config, overrides)
        if args.command == "run":
            res = run_experiment(config)
            final = res.final_best
            print(f"{config.algorithm} on {config.objective}: {len(final)} replicate(s), "
                  f"mean final best {final.mean():.6g}, written to {config.output_dir}")
        else:
            try:
                q_list = [int(s) for s in args.q_list.split(",") if s.strip()]
            except ValueError:
                raise ConfigError(f"bad --q-list {args.q_list!r}") from None
            results = batch_study(config, q_list, args.floor_budget)
            for q, r in results.items():
                print(f"q={q}: budget {r.budget}, mean final best {r.by_eval.mean_best[-1]:.6g}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
