"""Command line entry point: ``teampursuit <command> [options]``."""
from __future__ import annotations

import argparse
import sys

from .config import load_config
from .encoding import ALL_ORDERS, RiderOrder
from .experiment import (ALGORITHMS, COMMANDS, ExperimentSpec, format_report, pad_profile,
                         pad_strategy, parse_vector, run_experiment)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="teampursuit",
                                     description="Women's team pursuit pacing experiments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="TOML race configuration (defaults if omitted)")
    parser.add_argument("--order", action="append",
                        help="rider order such as BCA; repeatable, or 'all'")
    parser.add_argument("--reps", type=int, default=100, help="repetitions per order")
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument("--inner-budget", type=int, default=2000,
                        help="CMA-ES evaluations per power optimisation")
    parser.add_argument("--outer-budget", type=int, default=100,
                        help="strategy evaluations per search run")
    parser.add_argument("--exhaustive", action="store_true",
                        help="RLS: run until a neighbourhood yields no move")
    parser.add_argument("--algorithm", choices=ALGORITHMS, default="simple-ea")
    parser.add_argument("--start", choices=("random", "standard"), default="random",
                        help="starting strategy for optimize-strategy")
    parser.add_argument("--strategy", help="live transition strategy, e.g. '1,2,2,2,...'")
    parser.add_argument("--profile", help="live power profile in W, e.g. '900,364,...'")
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    parser.add_argument("--out", help="output directory for CSV files")
    return parser


def _orders(values):
    if not values:
        return None
    if any(v.lower() == "all" for v in values):
        return ALL_ORDERS
    return tuple(dict.fromkeys(RiderOrder.parse(v) for v in values))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        spec = ExperimentSpec(
            command=args.command,
            orders=_orders(args.order),
            repetitions=args.reps,
            inner_budget=args.inner_budget,
            outer_budget=None if args.exhaustive else args.outer_budget,
            algorithm=args.algorithm,
            base_seed=args.seed,
            output_dir=args.out,
            strategy=pad_strategy(parse_vector(args.strategy, int), config) if args.strategy else None,
            profile=pad_profile(parse_vector(args.profile), config) if args.profile else None,
            start=args.start,
            workers=args.workers,
        )
        report = run_experiment(spec, config)
    except (ValueError, OSError) as exc:
        print(f"teampursuit: error: {exc}", file=sys.stderr)
        return 1
    print(format_report(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
