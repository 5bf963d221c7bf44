"""Inner-loop optimisation of the leader power profile for a fixed transition strategy."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import cmaes
from .encoding import PowerProfile, RiderOrder, TransitionStrategy, standard_strategy
from .simulator import RaceConfig, RaceModel

DEFAULT_POWER = 400.0


@dataclass(frozen=True)
class CmaConfig:
    initial_sigma: float = 10.0
    max_evaluations: int = 2000
    population_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not self.initial_sigma > 0:
            raise ValueError("initial_sigma must be positive")
        if self.max_evaluations < 0:
            raise ValueError("max_evaluations must be non-negative")
        if self.population_size is not None and self.population_size < 2:
            raise ValueError("population_size must be at least 2")


@dataclass(frozen=True)
class PowerOptResult:
    best_profile: PowerProfile
    best_fitness: float
    evaluations_used: int


def _with_live(profile: PowerProfile, live: np.ndarray) -> PowerProfile:
    p = profile.as_array()
    p[:len(live)] = live
    return PowerProfile(p)


def optimize_powers_cmaes(strategy: TransitionStrategy, order: RiderOrder,
                          init_profile: PowerProfile, config: RaceConfig,
                          cma: CmaConfig = CmaConfig()) -> PowerOptResult:
    """CMA-ES over the live power entries, started at `init_profile`.

    Out-of-bounds samples are penalised rather than repaired.  The returned
    fitness is never worse than that of the initial profile.
    """
    model = RaceModel(strategy, order, config)
    x0 = model.live_powers(init_profile)
    f0 = model.fitness(x0)
    if cma.max_evaluations == 0:
        return PowerOptResult(init_profile, f0, 0)
    rng = np.random.default_rng(cma.seed)
    x, f, evals = cmaes.fmin(model.fitness, x0, cma.initial_sigma, cma.max_evaluations,
                             rng, cma.population_size)
    if f0 <= f:
        return PowerOptResult(init_profile, f0, evals)
    return PowerOptResult(_with_live(init_profile, x), f, evals)


def optimize_powers_random(strategy: TransitionStrategy, order: RiderOrder,
                           init_profile: PowerProfile, config: RaceConfig,
                           budget: int = 2000, step: float = 10.0,
                           seed: int = 0) -> PowerOptResult:
    """Random search baseline: uniform perturbation of the incumbent, keep strict improvements."""
    model = RaceModel(strategy, order, config)
    best = model.live_powers(init_profile)
    best_f = model.fitness(best)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        cand = best + rng.uniform(-step, step, size=best.shape)
        f = model.fitness(cand)
        if f < best_f:
            best, best_f = cand, f
    return PowerOptResult(_with_live(init_profile, best), best_f, budget)


def unoptimised_profile(kind: Literal["high_start", "constant"],
                        config: RaceConfig = RaceConfig()) -> PowerProfile:
    """Hand-set reference profiles: 900 W opening then 364 W, or 409 W throughout."""
    n = config.n_slots
    if kind == "high_start":
        return PowerProfile((900.0,) + (364.0,) * (n - 1))
    if kind == "constant":
        return PowerProfile.constant(409.0, n)
    raise ValueError(f"unknown profile kind {kind!r}")


def iterative_power_allocation(strategy: TransitionStrategy | None = None,
                               order: RiderOrder = RiderOrder(),
                               mode: Literal["high_start", "even"] = "high_start",
                               config: RaceConfig = RaceConfig(), *,
                               first_power: float = 900.0, tol: float = 1e-3,
                               max_sweeps: int = 200) -> PowerProfile:
    """Energy-exhausting allocation over a period-3 power pattern.

    Riders lead in a fixed rotation, so with three pattern levels each level
    sets the power of exactly one rider's turns in front.  Sweeps cycle over
    the levels; each level is moved up or down by a halving step (bisection)
    to the largest value that leaves its rider with non-negative energy.
    Sweeps repeat until no level moves by more than `tol` W, then all levels
    are backed off in `tol` steps until the whole team finishes.
    In ``high_start`` mode the opening entry is held at `first_power`.
    """
    if mode not in ("high_start", "even"):
        raise ValueError(f"unknown mode {mode!r}")
    strategy = strategy or standard_strategy(config.geometry, config.max_hl)
    model = RaceModel(strategy, order, config)
    m = model.m
    offset = 1 if mode == "high_start" else 0
    slot = np.array([-1 if i < offset else (i - offset) % 3 for i in range(m)])
    if m - offset < 3:
        raise ValueError("strategy too short for a period-3 pattern")
    # rider leading the turns governed by each level
    owner = [order.indices[(offset + j) % 3] for j in range(3)]

    def expand(levels):
        return np.where(slot < 0, first_power, levels[np.maximum(slot, 0)]).astype(float)

    def energies(levels):
        res = model.simulate(expand(levels), record_trace=False)
        return np.array(list(res.final_energies.values()))

    lo_bound, hi_bound = config.power_min, config.power_max
    levels = np.full(3, lo_bound)
    for _ in range(max_sweeps):
        previous = levels.copy()
        for j in range(3):
            trial = levels.copy()
            trial[j] = hi_bound
            if energies(trial)[owner[j]] >= 0:
                levels = trial
                continue
            lo, hi = lo_bound, hi_bound
            while hi - lo > tol / 4:
                trial[j] = 0.5 * (lo + hi)
                if energies(trial)[owner[j]] >= 0:
                    lo = trial[j]
                else:
                    hi = trial[j]
            levels[j] = lo
        if np.max(np.abs(levels - previous)) < tol:
            break
    while np.any(energies(levels) < 0) and np.any(levels > lo_bound):
        levels = np.maximum(levels - tol, lo_bound)
    return PowerProfile.from_live(expand(levels), config.n_slots, DEFAULT_POWER)
