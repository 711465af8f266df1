"""
Sweeping the packet arrival rate
================================

Reproduce the arrival-rate experiment: non-saturated traffic with the rate
varied from 0.5 to 4 packets per second for every priority.  Rising load
feeds the busy-slot probability back into every class; the highest
priority keeps its edge through the exclusive phase.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wban_csma import SweepMode, run_sweep
from wban_csma.presets import preset

(spec,) = preset("fig5")
table = run_sweep(spec, SweepMode.ANALYTICAL)
idx = {name: k for k, name in enumerate(table.columns)}

fig, axes = plt.subplots(2, 2, figsize=(10, 7))
labels = ("reliability", "throughput", "energy_j", "delay_s")
for ax, column in zip(axes.flat, labels):
    for up in range(8):
        xs = [float(r[idx["value"]]) for r in table.rows if r[idx["up"]] == up]
        ys = [r[idx[column]] for r in table.rows if r[idx["up"]] == up]
        ax.plot(xs, ys, marker="o", markersize=3, label=f"UP{up}")
    ax.set_xlabel("arrival rate (pkts/s)")
    ax.set_ylabel(column)
axes.flat[0].legend(fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig("arrival_rate_sweep.svg")
print("wrote arrival_rate_sweep.svg")

for up in (0, 7):
    ys = [r[idx["reliability"]] for r in table.rows if r[idx["up"]] == up]
    print(f"UP{up} reliability across the sweep: {[round(y, 3) for y in ys]}")
