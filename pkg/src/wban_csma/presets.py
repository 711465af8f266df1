"""Named experiment presets behind `reproduce fig5` .. `reproduce fig12`.

All presets share the general setup (2.4 GHz narrowband attributes, 100-byte
payload, EAP1 = 0.1 s, RAP1 = 0.8 s unless swept) and vary one dimension:

* fig5  - arrival rate 0.5..4.0 pkts/s, RTS/CTS, non-saturated, BER 2e-5
* fig6  - BER 0..1e-2, RTS/CTS, saturated
* fig7  - payload 0..260 bytes, RTS/CTS, saturated, BER 2e-5
* fig8  - RAP1 0.1..0.8 s, RTS/CTS, non-saturated (2 pkts/s), BER 2e-5
* fig9..fig12 - node count 8..64 for both access mechanisms, non-saturated
  (0.5 pkts/s), BER 2e-5; the four names emit the same table (they differ
  only in which metric the corresponding figure plots)

Simulation horizons and replication counts are not part of the source
experiments (which are analytical); the defaults baked here are documented
choices.
"""

from __future__ import annotations

from .config import SweepParameter, SweepSpec
from .params import Mechanism, Scenario, Traffic, uniform_scenario

PRESET_NAMES = tuple(f"fig{i}" for i in range(5, 13))

#: Replications and horizon used when a preset is simulated.
PRESET_REPLICATIONS = 20
PRESET_HORIZON = 60.0


def base_scenario(**overrides) -> Scenario:
    """16 nodes (2 per priority), RTS/CTS, saturated, noisy channel."""
    defaults = dict(
        ber=2e-5,
        payload_bytes=100,
        eap1_len=0.1,
        rap1_len=0.8,
        mechanism=Mechanism.RTS_CTS,
        traffic=Traffic.SATURATED,
        arrival_rates=2.0,
    )
    defaults.update(overrides)
    nodes = defaults.pop("nodes_per_up", 2)
    return uniform_scenario(nodes, **defaults)


def preset(name: str, seed: int = 1) -> list[SweepSpec]:
    """Sweep specs of one named preset (two for the dual-mechanism sweeps)."""
    if name == "fig5":
        return [
            SweepSpec(
                base=base_scenario(traffic=Traffic.NON_SATURATED),
                parameter=SweepParameter.ARRIVAL_RATE,
                values=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
                replications=PRESET_REPLICATIONS,
                seed=seed,
            )
        ]
    if name == "fig6":
        return [
            SweepSpec(
                base=base_scenario(),
                parameter=SweepParameter.BER,
                values=(0.0, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2),
                replications=PRESET_REPLICATIONS,
                seed=seed,
            )
        ]
    if name == "fig7":
        return [
            SweepSpec(
                base=base_scenario(),
                parameter=SweepParameter.PAYLOAD_BYTES,
                values=(0, 50, 100, 150, 200, 250, 260),
                replications=PRESET_REPLICATIONS,
                seed=seed,
            )
        ]
    if name == "fig8":
        return [
            SweepSpec(
                base=base_scenario(traffic=Traffic.NON_SATURATED, arrival_rates=2.0),
                parameter=SweepParameter.RAP1_LEN,
                values=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8),
                replications=PRESET_REPLICATIONS,
                seed=seed,
            )
        ]
    if name in ("fig9", "fig10", "fig11", "fig12"):
        specs = []
        for mechanism in (Mechanism.BASIC, Mechanism.RTS_CTS):
            specs.append(
                SweepSpec(
                    base=base_scenario(
                        traffic=Traffic.NON_SATURATED,
                        arrival_rates=0.5,
                        mechanism=mechanism,
                    ),
                    parameter=SweepParameter.NODE_COUNT,
                    values=(8, 16, 24, 32, 40, 48, 56, 64),
                    replications=PRESET_REPLICATIONS,
                    seed=seed,
                )
            )
        return specs
    raise KeyError(f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}")
