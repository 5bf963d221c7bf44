# Which starting order is fastest once the power profile is optimised?
# Uses the batch runner; a reduced budget keeps this to well under a minute.
#
#   python demos/03_rider_orders.py
from teampursuit import ExperimentSpec, run_experiment
from teampursuit.experiment import format_report

spec = ExperimentSpec("optimize-power", repetitions=5, inner_budget=1000, base_seed=1)
report = run_experiment(spec)
print(format_report(report))

fastest = min(report.rows, key=lambda r: r.best)
print(f"\nfastest start: {fastest.order} at {fastest.best:.2f} s")
