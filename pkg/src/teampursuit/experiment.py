"""Batch experiments: rider-order sweeps, seeded repetitions, CSV reports.

Output directory layout::

    config.json           race configuration actually used
    summary.csv           one row per (label, order): best / mean / sd
    runs.csv              one row per repetition
    best_trace_<X>.csv    step-by-step trace of the best run for row X

Repetition seeds are ``SeedSequence([base_seed, order_index, repetition])``
reduced to one 32-bit word, where ``order_index`` is the position of the
order in ``ABC, ACB, BAC, BCA, CAB, CBA``.  Any single run can therefore be
reproduced on its own.
"""
from __future__ import annotations

import csv
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .encoding import (ALL_ORDERS, RIDERS, PowerProfile, RiderOrder, TransitionStrategy,
                       standard_strategy)
from .power_optimizer import (DEFAULT_POWER, CmaConfig, iterative_power_allocation,
                              optimize_powers_cmaes, unoptimised_profile)
from .simulator import RaceConfig, simulate, velocity_trace_csv
from .strategy_search import SearchConfig, search_strategy

COMMANDS = ("simulate", "optimize-power", "optimize-strategy", "baselines")
ALGORITHMS = ("rls", "simple-ea")

SUMMARY_HEADER = ("label", "order", "runs", "best_s", "mean_s", "sd_s", "sd_defined",
                  "best_seed", "best_e_a_j", "best_e_b_j", "best_e_c_j",
                  "best_strategy", "best_profile_w")
RUNS_HEADER = ("label", "order", "repetition", "seed", "time_s", "feasible",
               "e_a_j", "e_b_j", "e_c_j", "strategy", "profile_w")


@dataclass(frozen=True)
class ExperimentSpec:
    command: str
    orders: tuple[RiderOrder, ...] | None = None  # None: ABC for simulate/baselines, else all
    repetitions: int = 100
    inner_budget: int = 2000
    outer_budget: int | None = 100
    algorithm: str = "simple-ea"
    base_seed: int = 0
    output_dir: Path | None = None
    strategy: TransitionStrategy | None = None
    profile: PowerProfile | None = None
    start: str = "random"
    workers: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.orders is not None and not self.orders:
            raise ValueError("orders must not be empty")
        if self.inner_budget < 0:
            raise ValueError("inner_budget must be non-negative")
        if self.outer_budget is not None and self.outer_budget < 1:
            raise ValueError("outer_budget must be at least 1")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.start not in ("random", "standard"):
            raise ValueError("start must be 'random' or 'standard'")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    @property
    def selected_orders(self) -> tuple[RiderOrder, ...]:
        if self.orders is not None:
            return self.orders
        if self.command in ("simulate", "baselines"):
            return (RiderOrder(),)
        return ALL_ORDERS


@dataclass(frozen=True)
class RunRecord:
    label: str
    order: RiderOrder
    repetition: int
    seed: int
    time: float
    feasible: bool
    energies: tuple[float, float, float]
    strategy: TransitionStrategy
    profile: PowerProfile


@dataclass(frozen=True)
class ReportRow:
    label: str
    order: RiderOrder
    runs: int
    best: float
    mean: float
    sd: float
    sd_defined: bool
    best_run: RunRecord


@dataclass
class OptimizerReport:
    rows: list[ReportRow] = field(default_factory=list)
    runs: list[RunRecord] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def row(self, order: str | RiderOrder, label: str | None = None) -> ReportRow:
        for r in self.rows:
            if str(r.order) == str(order) and (label is None or r.label == label):
                return r
        raise KeyError((str(order), label))


def summarize(times) -> tuple[float, float, float]:
    """(min, mean, sample standard deviation); sd is 0 for a single value."""
    times = [float(t) for t in times]
    if not times:
        raise ValueError("cannot summarise an empty sample")
    sd = statistics.stdev(times) if len(times) > 1 else 0.0
    return min(times), statistics.fmean(times), sd


def derive_seed(base_seed: int, order_index: int, repetition: int) -> int:
    return int(np.random.SeedSequence([base_seed, order_index, repetition]).generate_state(1)[0])


def _record(label, order, rep, seed, strategy, profile, config) -> RunRecord:
    res = simulate(strategy, profile, order, config, record_trace=False)
    energies = tuple(res.final_energies[r] for r in RIDERS)
    return RunRecord(label, order, rep, seed, res.total_time, res.feasible, energies,
                     strategy, profile)


def _run_one(task) -> RunRecord:
    spec, config, label, order, rep, seed = task
    strategy = spec.strategy or standard_strategy(config.geometry, config.max_hl)
    if spec.command == "simulate":
        profile = spec.profile or unoptimised_profile("high_start", config)
        return _record(label, order, rep, seed, strategy, profile, config)
    if spec.command == "baselines":
        if label.startswith("unoptimised"):
            kind = "high_start" if label.endswith("1") else "constant"
            profile = unoptimised_profile(kind, config)
        else:
            mode = "high_start" if label.endswith("1") else "even"
            profile = iterative_power_allocation(strategy, order, mode, config)
        return _record(label, order, rep, seed, strategy, profile, config)
    if spec.command == "optimize-power":
        init = spec.profile or PowerProfile.constant(DEFAULT_POWER, config.n_slots)
        cma = CmaConfig(max_evaluations=spec.inner_budget, seed=seed)
        res = optimize_powers_cmaes(strategy, order, init, config, cma)
        return _record(label, order, rep, seed, strategy, res.best_profile, config)
    search = SearchConfig(spec.outer_budget, CmaConfig(max_evaluations=spec.inner_budget), seed)
    # an explicit --strategy is the starting point; otherwise random or standard
    start = strategy if spec.start == "standard" else spec.strategy
    sol = search_strategy(spec.algorithm, order, config, search, start)
    return _record(label, order, rep, seed, sol.strategy, sol.profile, config)


def _labels(spec: ExperimentSpec) -> tuple[str, ...]:
    if spec.command == "baselines":
        return ("unoptimised_1", "unoptimised_2", "iterative_1", "iterative_2")
    if spec.command == "optimize-strategy":
        return (spec.algorithm,)
    return (spec.command,)


def run_experiment(spec: ExperimentSpec, config: RaceConfig = RaceConfig()) -> OptimizerReport:
    """Run every (label, order, repetition) task and aggregate; write files if
    `spec.output_dir` is set."""
    deterministic = spec.command in ("simulate", "baselines")
    reps = 1 if deterministic else spec.repetitions
    tasks = []
    for label in _labels(spec):
        for order in spec.selected_orders:
            oi = ALL_ORDERS.index(order)
            for rep in range(reps):
                tasks.append((spec, config, label, order, rep, derive_seed(spec.base_seed, oi, rep)))

    if spec.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            runs = list(pool.map(_run_one, tasks))
    else:
        runs = [_run_one(t) for t in tasks]

    report = OptimizerReport(runs=runs, config=config.to_dict())
    for label in _labels(spec):
        for order in spec.selected_orders:
            group = [r for r in runs if r.label == label and r.order == order]
            best, mean, sd = summarize(r.time for r in group)
            best_run = min(group, key=lambda r: (r.time, r.repetition))
            report.rows.append(ReportRow(label, order, len(group), best, mean, sd,
                                         len(group) > 1, best_run))
    if spec.output_dir is not None:
        write_report(report, spec, config)
    return report


def _fmt(x: float) -> str:
    return repr(float(x))


def _vector(values) -> str:
    return " ".join(str(v) if isinstance(v, int) else _fmt(v) for v in values)


def write_report(report: OptimizerReport, spec: ExperimentSpec, config: RaceConfig) -> None:
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "config.json", "w") as fh:
        json.dump(report.config, fh, indent=2, sort_keys=True)
        fh.write("\n")

    with open(out / "runs.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUNS_HEADER)
        for r in report.runs:
            m = r.strategy.effective_length
            w.writerow([r.label, str(r.order), r.repetition, r.seed, _fmt(r.time),
                        int(r.feasible), *map(_fmt, r.energies), _vector(r.strategy.live),
                        _vector(r.profile.p[:m])])

    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for row in report.rows:
            b = row.best_run
            m = b.strategy.effective_length
            w.writerow([row.label, str(row.order), row.runs, _fmt(row.best), _fmt(row.mean),
                        _fmt(row.sd), int(row.sd_defined), b.seed, *map(_fmt, b.energies),
                        _vector(b.strategy.live), _vector(b.profile.p[:m])])

    multi_label = len({row.label for row in report.rows}) > 1
    for row in report.rows:
        b = row.best_run
        res = simulate(b.strategy, b.profile, b.order, config)
        name = f"{row.label}_{row.order}" if multi_label else str(row.order)
        (out / f"best_trace_{name}.csv").write_text(velocity_trace_csv(res))


def format_report(report: OptimizerReport) -> str:
    lines = [f"{'label':<18}{'order':<7}{'runs':>5}{'best (s)':>11}{'mean (s)':>11}"
             f"{'sd':>8}  final energies A/B/C (J)   strategy"]
    for row in report.rows:
        b = row.best_run
        sd = f"{row.sd:8.3f}" if row.sd_defined else f"{'n/a':>8}"
        energies = " / ".join(f"{e:.1f}" for e in b.energies)
        lines.append(f"{row.label:<18}{str(row.order):<7}{row.runs:>5}{row.best:>11.2f}"
                     f"{row.mean:>11.3f}{sd}  {energies:<26} {b.strategy}")
    return "\n".join(lines)


def parse_vector(text: str, cast=float) -> list:
    """Parse '1,2,2' or '1 2 2' into a list."""
    parts = text.replace(",", " ").split()
    if not parts:
        raise ValueError("empty vector")
    return [cast(p) for p in parts]


def pad_strategy(live: list[int], config: RaceConfig, filler: int = 2) -> TransitionStrategy:
    n = config.n_slots
    if len(live) > n:
        raise ValueError(f"strategy has {len(live)} entries, race allows {n}")
    return TransitionStrategy(tuple(live) + (filler,) * (n - len(live)), config.max_hl)


def pad_profile(live: list[float], config: RaceConfig) -> PowerProfile:
    n = config.n_slots
    if len(live) > n:
        raise ValueError(f"profile has {len(live)} entries, race allows {n}")
    return PowerProfile.from_live(live, n, DEFAULT_POWER)

