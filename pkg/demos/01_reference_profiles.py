# Simulate the hand-set and iteratively allocated power profiles for the
# standard "one swap per lap" strategy, starting order ABC.
#
#   python demos/01_reference_profiles.py
import matplotlib.pyplot as plt

from teampursuit import (RaceConfig, RiderOrder, iterative_power_allocation, simulate,
                         standard_strategy, unoptimised_profile)

config = RaceConfig()
strategy = standard_strategy()
order = RiderOrder.parse("ABC")

profiles = {
    "unoptimised 1 (900 W, then 364 W)": unoptimised_profile("high_start", config),
    "unoptimised 2 (409 W throughout)": unoptimised_profile("constant", config),
    "iterative 1 (high start)": iterative_power_allocation(strategy, order, "high_start", config),
    "iterative 2 (even)": iterative_power_allocation(strategy, order, "even", config),
}

# Every profile is ridden from a standing start; the 11 swaps cost 0.12 s each.
results = {name: simulate(strategy, p, order, config) for name, p in profiles.items()}
for name, res in results.items():
    e = res.final_energies
    print(f"{name:<36} {res.total_time:8.2f} s   left A {e['A']:7.1f}  B {e['B']:7.1f}  C {e['C']:7.1f} J")

# Velocity against distance. The first turn is the standing start.
fig, ax = plt.subplots(figsize=(8, 4))
for name, res in results.items():
    ax.plot(res.trace.distance, res.trace.velocity * 3.6, label=name, lw=1)
ax.set_xlabel("distance (m)")
ax.set_ylabel("speed (km/h)")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("reference_profiles_velocity.png", dpi=120)
print("wrote reference_profiles_velocity.png")
