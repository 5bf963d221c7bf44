# Search transition strategies as well as powers: each candidate strategy is
# scored by an inner CMA-ES run seeded from the incumbent's power profile.
#
#   python demos/04_strategy_search.py
from teampursuit import CmaConfig, RaceConfig, RiderOrder, SearchConfig, simulate
from teampursuit.strategy_search import SearchHistory, initial_solution, rls, simple_ea

config = RaceConfig()
order = RiderOrder.parse("BAC")
search = SearchConfig(outer_budget=100, inner=CmaConfig(max_evaluations=500), seed=3)

for name, algorithm in (("Simple EA", simple_ea), ("RLS", rls)):
    start = initial_solution(order, config, search)          # uniformly random strategy
    history = SearchHistory()
    best = algorithm(start, config, search, history=history)
    res = simulate(best.strategy, best.profile, order, config)
    print(f"{name}: {start.fitness:.2f} s -> {best.fitness:.2f} s "
          f"after {len(history.evaluated)} strategy evaluations")
    print("  strategy", best.strategy)
    print("  powers  ", [round(p) for p in best.profile.p[:best.strategy.effective_length]])
    print("  energy left (J)", {k: round(v, 1) for k, v in res.final_energies.items()})
