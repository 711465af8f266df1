"""Per-priority performance metrics derived from a converged solution:
reliability, normalized throughput, energy per state and average access
delay."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import exchange_durations, window_schedule
from .errors import ValidationError
from .params import NUM_PRIORITIES, Mechanism, Scenario
from .solver import SolutionState


@dataclass(frozen=True)
class MetricsReport:
    """One value per priority; None marks an unavailable entry."""

    reliability: tuple
    throughput: tuple
    energy: tuple
    delay: tuple
    x_eap: Optional[float] = None
    x_rap: Optional[float] = None
    t_wait: tuple = (None,) * NUM_PRIORITIES

    def for_up(self, i: int) -> dict:
        return {
            "reliability": self.reliability[i],
            "throughput": self.throughput[i],
            "energy": self.energy[i],
            "delay": self.delay[i],
        }


def reliability(up, p_fail: float) -> float:
    """Probability a frame is delivered within the retry limit."""
    if not 0.0 <= p_fail <= 1.0:
        raise ValidationError("p_fail outside [0,1]")
    return 1.0 - p_fail ** up.num_stages


def normalized_throughput(solution: SolutionState, scenario: Scenario) -> tuple:
    """Fraction of channel time each priority spends delivering payload."""
    eap_slots, rap_slots = scenario.eap_slots, scenario.rap_slots
    if rap_slots <= 0:
        raise ValidationError("rap1_len shorter than one CSMA slot")
    slot = scenario.phy.csma_slot
    x_rap = rap_slots / (solution.t_e_rap / slot)
    x_eap = eap_slots / (solution.t_e_eap / slot)
    payload_slots = (8 * scenario.payload_bytes / scenario.phy.psdu_rate) / slot
    total_slots = eap_slots + rap_slots
    out = []
    for i in range(NUM_PRIORITIES):
        if i not in solution.active:
            out.append(None)
        elif i == 7:
            busy = (
                solution.p_tran_eap * x_eap + solution.p_tran_rap * x_rap
            )
            out.append(solution.p_succ[7] * busy * payload_slots / total_slots)
        else:
            out.append(
                solution.p_succ_rap[i]
                * solution.p_tran_rap
                * x_rap
                * payload_slots
                / total_slots
            )
    return tuple(out)


def _phase_mixed_tran(solution: SolutionState, scenario: Scenario, i: int) -> float:
    if i == 7:
        eap_slots, rap_slots = scenario.eap_slots, scenario.rap_slots
        total = eap_slots + rap_slots
        return (
            eap_slots / total * solution.p_tran_eap
            + rap_slots / total * solution.p_tran_rap
        )
    return solution.p_tran_rap


def energy_consumption(solution: SolutionState, scenario: Scenario) -> tuple:
    """Mean energy one node of each priority spends per model state.

    Four additive stages: idling through an empty slot, the node's own
    exchanges (split into transmit/receive/idle frame parts), and
    overhearing other classes' exchanges at idle power.
    """
    phy = scenario.phy
    dur = exchange_durations(phy, scenario.mechanism, scenario.payload_bytes)
    sum_succ = sum(solution.p_succ[i] for i in solution.active)
    sum_coll = sum(solution.p_coll[i] for i in solution.active)
    sum_error = sum(solution.p_error[i] for i in solution.active)
    if scenario.mechanism is Mechanism.BASIC:
        own_succ = dur.t_data * phy.p_tx + dur.t_ctrl * phy.p_rx + phy.sifs * phy.p_idle
        own_coll = own_succ
    else:
        own_succ = (
            dur.t_ctrl * phy.p_tx
            + dur.t_ctrl * phy.p_rx
            + dur.t_data * phy.p_tx
            + dur.t_ctrl * phy.p_rx
            + 3 * phy.sifs * phy.p_idle
        )
        own_coll = dur.t_ctrl * phy.p_tx + dur.t_ctrl * phy.p_rx + phy.sifs * phy.p_idle
    out = []
    for i in range(NUM_PRIORITIES):
        if i not in solution.active:
            out.append(None)
            continue
        p_tran = _phase_mixed_tran(solution, scenario, i)
        e_idle = phy.csma_slot * phy.p_idle * solution.p_idle[i]
        e_succ = own_succ * p_tran * solution.p_succ[i] + dur.t_succ * phy.p_idle * p_tran * (
            sum_succ - solution.p_succ[i]
        )
        e_coll = own_coll * p_tran * solution.p_coll[i] + dur.t_coll * phy.p_idle * p_tran * (
            sum_coll - solution.p_coll[i]
        )
        e_error = own_succ * p_tran * solution.p_error[i] + dur.t_succ * phy.p_idle * p_tran * (
            sum_error - solution.p_error[i]
        )
        out.append(e_idle + e_succ + e_coll + e_error)
    return tuple(out)


def average_access_delay(solution: SolutionState, scenario: Scenario) -> tuple:
    """Mean time from frame birth to success or drop, per priority.

    Lower priorities pay half the exclusive phase as mean waiting time;
    the backoff part sums the mean counter draws of every stage reached,
    weighted by the failure-path probabilities, at the per-state time.
    """
    out = []
    for i in range(NUM_PRIORITIES):
        if i not in solution.active:
            out.append(None)
            continue
        up = scenario.up_table[i]
        t_wait = 0.0 if i == 7 else scenario.eap1_len / 2.0
        windows = window_schedule(up)
        cum = []
        acc = 0.0
        for w in windows:
            acc += (w + 1) / 2
            cum.append(acc)
        p_fail = solution.p_fail[i]
        t_e = solution.t_e[i]
        backoff = 0.0
        power = 1.0
        for j in range(up.num_stages):
            backoff += power * (1.0 - p_fail) * cum[j]
            power *= p_fail
        backoff += power * cum[-1]
        out.append(t_wait + backoff * t_e)
    return tuple(out)


def waiting_times(scenario: Scenario) -> tuple:
    """Mean permitted-phase waiting time per priority (zero for UP7)."""
    return tuple(
        0.0 if i == 7 else scenario.eap1_len / 2.0 for i in range(NUM_PRIORITIES)
    )


def analytical_metrics(solution: SolutionState) -> MetricsReport:
    """Assemble the full report for a converged solution."""
    scenario = solution.scenario
    slot = scenario.phy.csma_slot
    rel = tuple(
        reliability(scenario.up_table[i], solution.p_fail[i])
        if i in solution.active
        else None
        for i in range(NUM_PRIORITIES)
    )
    return MetricsReport(
        reliability=rel,
        throughput=normalized_throughput(solution, scenario),
        energy=energy_consumption(solution, scenario),
        delay=average_access_delay(solution, scenario),
        x_eap=scenario.eap_slots / (solution.t_e_eap / slot),
        x_rap=scenario.rap_slots / (solution.t_e_rap / slot),
        t_wait=tuple(
            w if i in solution.active else None
            for i, w in enumerate(waiting_times(scenario))
        ),
    )
