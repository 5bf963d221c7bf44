# Optimise the leader power levels of the standard strategy with CMA-ES and
# compare against the random-search baseline on the same budget.
#
#   python demos/02_power_optimisation.py
import numpy as np

from teampursuit import (CmaConfig, PowerProfile, RaceConfig, RiderOrder, optimize_powers_cmaes,
                         optimize_powers_random, simulate, standard_strategy, unoptimised_profile)

config = RaceConfig()
strategy = standard_strategy()
order = RiderOrder.parse("ABC")
start = PowerProfile.constant(400.0, config.n_slots)   # 12 live entries, the rest is filler

reference = simulate(strategy, unoptimised_profile("high_start", config), order, config)
print(f"unoptimised 1: {reference.total_time:.2f} s")

cma_times, rnd_times = [], []
for seed in range(5):
    cma = optimize_powers_cmaes(strategy, order, start, config,
                                CmaConfig(initial_sigma=10.0, max_evaluations=2000, seed=seed))
    rnd = optimize_powers_random(strategy, order, start, config, budget=2000, step=10.0, seed=seed)
    cma_times.append(cma.best_fitness)
    rnd_times.append(rnd.best_fitness)
    print(f"seed {seed}: CMA-ES {cma.best_fitness:.2f} s   random search {rnd.best_fitness:.2f} s")

print(f"CMA-ES mean {np.mean(cma_times):.2f} s, random search mean {np.mean(rnd_times):.2f} s")

# The best CMA-ES profile, live entries only
print("profile (W):", [round(p) for p in cma.best_profile.p[:strategy.effective_length]])
