"""
Reconstructing the backoff-chain occupancy
==========================================

After a solve, the full stationary distribution over (stage, counter)
states can be rebuilt per priority.  The occupancy concentrates at the
deep stages for the low priorities (their attempts usually fail under
saturation) and sums to one exactly.
"""

from wban_csma import base_scenario, solve_fixed_point, stationary_distribution

solution = solve_fixed_point(base_scenario())

for up in (0, 7):
    dist = stationary_distribution(up, solution)
    mass_per_stage = [sum(level) for level in dist.levels]
    print(f"UP{up}: total = {dist.total():.12f}, empty-state mass = {dist.empty:.3g}")
    for stage, mass in enumerate(mass_per_stage):
        bar = "#" * int(round(60 * mass / max(mass_per_stage)))
        print(f"  stage {stage}: {mass:8.4f} {bar}")
    print()

# per-counter detail of the zero stage for the lowest priority
dist0 = stationary_distribution(0, solution)
level0 = dist0.levels[0]
print("UP0 stage-0 counter profile (k = 0 .. W0):")
print("  " + " ".join(f"{p:.4f}" for p in level0))
