"""
Cross-validating the model against the simulator
================================================

Run the discrete-event simulation of the actual backoff procedure next to
the analytical fixed point and tabulate the per-metric deviations.  The
throughput estimates track each other well; reliability and delay expose
the model's busy-slot bookkeeping (see the repo README for the analysis).
"""

from wban_csma import (
    analytical_metrics,
    base_scenario,
    compare,
    run_replications,
    sim_metrics,
    solve_fixed_point,
    summarize_replications,
)

scenario = base_scenario()
analytical = analytical_metrics(solve_fixed_point(scenario))

replications = 5
stats = run_replications(scenario, seed=7, horizon=20.0, replications=replications)
simulated, half = summarize_replications([sim_metrics(s, scenario) for s in stats])
print(f"{replications} replications x 20 s simulated")

report = compare({"base": analytical}, {"base": simulated})
print(f"\n{'UP':>3} {'metric':>12} {'model':>10} {'sim':>10} {'dev':>8}  verdict")
for row in report.rows:
    verdict = "-" if row.within is None else ("ok" if row.within else "outside")
    print(
        f"{row.up:>3} {row.metric:>12} {row.analytical:10.4g} "
        f"{row.simulated:10.4g} {row.deviation:8.1%}  {verdict}"
    )
print("\noverall:", "within tolerances" if report.passed else "outside tolerances")
