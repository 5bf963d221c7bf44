"""Simulation and metaheuristic optimisation of women's team pursuit pacing."""
from .encoding import (ALL_ORDERS, PowerProfile, RiderOrder, TrackGeometry, TransitionStrategy,
                       atomic_unit_count, effective_length, rotate, segment_distances,
                       standard_strategy)
from .physics import BikeParams, Environment, ModelConstants, RiderParams
from .power_optimizer import (CmaConfig, PowerOptResult, iterative_power_allocation,
                              optimize_powers_cmaes, optimize_powers_random,
                              unoptimised_profile)
from .simulator import (PenaltyConfig, RaceConfig, RaceResult, penalized_fitness, simulate,
                        velocity_trace_csv)
from .strategy_search import (SearchConfig, StrategySolution, bilevel_fitness, mutate,
                              neighbors, rls, simple_ea)
from .config import load_config
from .experiment import ExperimentSpec, OptimizerReport, run_experiment, summarize

__version__ = "0.1.0"
