"""
Solving one scenario analytically
=================================

Build the reference operating point (16 saturated nodes, two per priority,
RTS/CTS handshake over a noisy channel), solve the coupled probability
system and read off the four per-priority performance metrics.
"""

from wban_csma import analytical_metrics, base_scenario, solve_fixed_point

scenario = base_scenario()
print(
    f"{scenario.total_nodes} nodes, mechanism={scenario.mechanism.value}, "
    f"traffic={scenario.traffic.value}, BER={scenario.ber}"
)

solution = solve_fixed_point(scenario)
print(f"converged in {solution.iterations} iterations, residual {solution.residual:.2e}")
print(f"busy-slot probability: EAP1 {solution.p_tran_eap:.3f}, RAP1 {solution.p_tran_rap:.3f}")
print(f"expected state time:   EAP1 {solution.t_e_eap * 1e3:.3f} ms, RAP1 {solution.t_e_rap * 1e3:.3f} ms")

report = analytical_metrics(solution)
print(f"\n{'UP':>3} {'tau':>8} {'p_fail':>8} {'R':>8} {'S':>9} {'E (uJ)':>8} {'D (ms)':>9}")
for i in range(8):
    print(
        f"{i:>3} {solution.tau[i]:8.4f} {solution.p_fail[i]:8.4f} "
        f"{report.reliability[i]:8.4f} {report.throughput[i]:9.5f} "
        f"{report.energy[i] * 1e6:8.2f} {report.delay[i] * 1e3:9.2f}"
    )

# the highest priority contends with a one-slot minimum window and owns the
# exclusive phase, hence the dominant transmission probability above
