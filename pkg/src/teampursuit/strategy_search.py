"""Outer-loop search over transition strategies (random local search and a (1+1) EA).

A strategy's fitness is the race time of the best power profile found for it
by an inner CMA-ES run seeded from the incumbent's profile.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Protocol

import numpy as np

from .encoding import (PowerProfile, RiderOrder, TransitionStrategy, effective_length,
                       random_strategy)
from .power_optimizer import DEFAULT_POWER, CmaConfig, optimize_powers_cmaes
from .simulator import RaceConfig

# Safety cap for run-to-exhaustion RLS, which can otherwise cycle on plateaus.
EXHAUSTIVE_CAP = 100_000


class FitnessFunction(Protocol):
    def __call__(self, strategy: TransitionStrategy, order: RiderOrder,
                 incumbent_profile: PowerProfile, seed: int) -> tuple[float, PowerProfile]: ...


@dataclass(frozen=True)
class StrategySolution:
    strategy: TransitionStrategy
    profile: PowerProfile
    fitness: float
    order: RiderOrder


@dataclass(frozen=True)
class SearchConfig:
    outer_budget: int | None = 100  # None: RLS runs until no neighbour improves
    inner: CmaConfig = field(default_factory=CmaConfig)
    seed: int = 0

    def __post_init__(self):
        if self.outer_budget is not None and self.outer_budget < 1:
            raise ValueError("outer_budget must be at least 1")


@dataclass
class SearchHistory:
    """Incumbent fitness after every outer evaluation, and every strategy tried."""
    incumbent_fitness: list[float] = field(default_factory=list)
    evaluated: list[TransitionStrategy] = field(default_factory=list)


def transfer_profile(profile: PowerProfile, strategy: TransitionStrategy) -> PowerProfile:
    """Inherit live powers positionally; slots beyond the live prefix reset to the default."""
    p = profile.as_array()
    p[effective_length(strategy):] = DEFAULT_POWER
    return PowerProfile(p)


def bilevel_fitness(strategy: TransitionStrategy, order: RiderOrder,
                    incumbent_profile: PowerProfile, config: RaceConfig,
                    inner: CmaConfig = CmaConfig()) -> tuple[float, PowerProfile]:
    """Race time of the CMA-ES-optimised power profile for `strategy`."""
    init = transfer_profile(incumbent_profile, strategy)
    res = optimize_powers_cmaes(strategy, order, init, config, inner)
    return res.best_fitness, transfer_profile(res.best_profile, strategy)


class _CachedFitness:
    """Evaluates (strategy, order) pairs once per search run, keyed on live entries."""

    def __init__(self, fitness: FitnessFunction, order: RiderOrder, rng: np.random.Generator,
                 history: SearchHistory):
        self.fitness = fitness
        self.order = order
        self.rng = rng
        self.history = history
        self.cache: dict[tuple[int, ...], tuple[float, PowerProfile]] = {}

    def __call__(self, strategy: TransitionStrategy, incumbent: PowerProfile):
        self.history.evaluated.append(strategy)
        key = strategy.live
        if key not in self.cache:
            seed = int(self.rng.integers(2**31))
            self.cache[key] = self.fitness(strategy, self.order, incumbent, seed)
        return self.cache[key]


def _default_fitness(config: RaceConfig, inner: CmaConfig) -> FitnessFunction:
    def fitness(strategy, order, incumbent, seed):
        return bilevel_fitness(strategy, order, incumbent, config, replace(inner, seed=seed))
    return fitness


def neighbors(strategy: TransitionStrategy) -> list[TransitionStrategy]:
    """All strategies one unit away in a single live entry, within [1, max_hl]."""
    out = []
    hl = strategy.hl
    for i in range(effective_length(strategy)):
        for delta in (-1, 1):
            h = hl[i] + delta
            if 1 <= h <= strategy.max_hl:
                out.append(TransitionStrategy(hl[:i] + (h,) + hl[i + 1:], strategy.max_hl))
    return out


def mutate(strategy: TransitionStrategy, rng: np.random.Generator) -> TransitionStrategy:
    """Resample each live entry with probability 1/m to a different value."""
    m = effective_length(strategy)
    hl = list(strategy.hl)
    k = strategy.max_hl
    if k < 2:
        return strategy
    for i in np.flatnonzero(rng.random(m) < 1.0 / m):
        # uniform over the k - 1 values other than the current one
        new = int(rng.integers(1, k))
        hl[i] = new if new < hl[i] else new + 1
    return TransitionStrategy(tuple(hl), k)


def initial_solution(order: RiderOrder, config: RaceConfig, search: SearchConfig,
                     strategy: TransitionStrategy | None = None,
                     fitness: FitnessFunction | None = None) -> StrategySolution:
    """Evaluate a starting point; a uniformly random strategy unless one is given."""
    rng = np.random.default_rng([search.seed, 0x5EED])
    if strategy is None:
        strategy = random_strategy(rng, config.geometry, config.max_hl)
    fitness = fitness or _default_fitness(config, search.inner)
    profile = PowerProfile.constant(DEFAULT_POWER, config.n_slots)
    f, profile = fitness(strategy, order, profile, int(rng.integers(2**31)))
    return StrategySolution(strategy, profile, f, order)


def rls(start: StrategySolution, config: RaceConfig, search: SearchConfig = SearchConfig(),
        fitness: FitnessFunction | None = None,
        history: SearchHistory | None = None) -> StrategySolution:
    """Random local search: visit unseen neighbours of the incumbent in random
    order and move to the first one that is no worse.  Stops when a whole
    neighbourhood has been seen without a move, or when the budget runs out."""
    history = history if history is not None else SearchHistory()
    rng = np.random.default_rng([search.seed, 1])
    evaluate = _CachedFitness(fitness or _default_fitness(config, search.inner),
                              start.order, rng, history)
    budget = search.outer_budget if search.outer_budget is not None else EXHAUSTIVE_CAP
    best = start
    used = 0
    while used < budget:
        candidates = neighbors(best.strategy)
        moved = False
        for i in rng.permutation(len(candidates)):
            if used >= budget:
                break
            f, profile = evaluate(candidates[i], best.profile)
            used += 1
            if f <= best.fitness:
                best = StrategySolution(candidates[i], profile, f, best.order)
                moved = True
            history.incumbent_fitness.append(best.fitness)
            if moved:
                break
        if not moved:
            break
    return best


def simple_ea(start: StrategySolution, config: RaceConfig, search: SearchConfig = SearchConfig(),
              fitness: FitnessFunction | None = None,
              history: SearchHistory | None = None) -> StrategySolution:
    """(1+1) EA with per-entry resampling probability 1/m and non-worsening acceptance."""
    history = history if history is not None else SearchHistory()
    rng = np.random.default_rng([search.seed, 2])
    evaluate = _CachedFitness(fitness or _default_fitness(config, search.inner),
                              start.order, rng, history)
    evaluate.cache[start.strategy.live] = (start.fitness, start.profile)
    best = start
    generations = search.outer_budget if search.outer_budget is not None else 100
    for _ in range(generations):
        child = mutate(best.strategy, rng)
        f, profile = evaluate(child, best.profile)
        if f <= best.fitness:
            best = StrategySolution(child, profile, f, best.order)
        history.incumbent_fitness.append(best.fitness)
    return best


def search_strategy(algorithm: str, order: RiderOrder, config: RaceConfig,
                    search: SearchConfig = SearchConfig(),
                    start: TransitionStrategy | None = None,
                    fitness: FitnessFunction | None = None) -> StrategySolution:
    """Evaluate a starting strategy and improve it with ``rls`` or ``simple-ea``."""
    algorithms = {"rls": rls, "simple-ea": simple_ea}
    if algorithm not in algorithms:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(algorithms)}")
    first = initial_solution(order, config, search, start, fitness)
    return algorithms[algorithm](first, config, search, fitness)


def mock_fitness_sum(strategy: TransitionStrategy, order: RiderOrder,
                     incumbent_profile: PowerProfile, seed: int) -> tuple[float, PowerProfile]:
    """Sum of all stored entries; minimised only by the all-ones strategy."""
    return float(sum(strategy.hl)), incumbent_profile

