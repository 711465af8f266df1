"""Discrete-event simulation of the actual CSMA/CA backoff procedure.

The channel is slot-aligned: transmissions begin only at CSMA slot
boundaries, a collision is two or more nodes reaching counter zero in the
same slot, and a solitary transmission is corrupted with the closed-form
packet error probability.  Each superframe is EAP1 (UP7 only) followed by
RAP1 (all priorities).  Counters lock while the channel is busy, while the
phase forbids the priority, or when the remaining phase cannot fit an
exchange; unlocking needs a SIFS of idle air plus enough remaining time,
re-checked every slot.

Idle stretches are simulated in one step (every eligible counter
decrements once per idle slot, so the time to the next transmission is the
minimum counter value), which keeps long horizons cheap without changing
the per-slot semantics.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (
    cw_schedule,
    exchange_durations,
    packet_error_rate,
    validate_feasible,
    window_schedule,
)
from .errors import ValidationError
from .metrics import MetricsReport
from .params import NUM_PRIORITIES, Mechanism, Scenario, Traffic

_EPS = 1e-12


@dataclass
class NodeState:
    """Mutable backoff state of one simulated node."""

    node_id: int
    up_index: int
    rng: np.random.Generator
    has_frame: bool = False
    stage: int = 0
    counter: int = 0
    frame_birth: float = 0.0
    next_arrival: float = math.inf


@dataclass
class SimStats:
    """Counters and accumulators of one replication (accounting window).

    Per-priority lists are indexed by UP.  Event totals and audit results
    cover the whole run including warm-up.
    """

    frames_generated: list = field(default_factory=lambda: [0] * NUM_PRIORITIES)
    attempts: list = field(default_factory=lambda: [0] * NUM_PRIORITIES)
    successes: list = field(default_factory=lambda: [0] * NUM_PRIORITIES)
    collisions: list = field(default_factory=lambda: [0] * NUM_PRIORITIES)
    error_transmissions: list = field(default_factory=lambda: [0] * NUM_PRIORITIES)
    drops: list = field(default_factory=lambda: [0] * NUM_PRIORITIES)
    suppressed_arrivals: list = field(default_factory=lambda: [0] * NUM_PRIORITIES)
    total_access_delay: list = field(default_factory=lambda: [0.0] * NUM_PRIORITIES)
    payload_bits_delivered: list = field(default_factory=lambda: [0.0] * NUM_PRIORITIES)
    energy_tx: list = field(default_factory=lambda: [0.0] * NUM_PRIORITIES)
    energy_rx: list = field(default_factory=lambda: [0.0] * NUM_PRIORITIES)
    energy_idle: list = field(default_factory=lambda: [0.0] * NUM_PRIORITIES)
    simulated_time: float = 0.0
    superframes_elapsed: int = 0
    idle_slot_time: float = 0.0
    busy_time: float = 0.0
    residue_time: float = 0.0
    channel_intervals: int = 0
    decrement_events: int = 0
    transmission_events: int = 0
    arrival_events: int = 0
    audit_violations: int = 0
    audit_messages: tuple = ()

    @property
    def total_events(self) -> int:
        return self.decrement_events + self.transmission_events + self.arrival_events


class _Audit:
    def __init__(self, limit: int = 16):
        self.count = 0
        self.messages: list[str] = []
        self.limit = limit

    def violation(self, message: str):
        self.count += 1
        if len(self.messages) < self.limit:
            self.messages.append(message)


def _check_window_rule(up, audit: _Audit):
    """Independent restatement of the window-selection rule: unchanged after
    odd stages, doubled after even ones, capped at cw_max past stage m."""
    windows = window_schedule(up)
    for j in range(1, up.num_stages):
        if j <= up.m:
            expect = windows[j - 1] * 2 if j % 2 == 0 else windows[j - 1]
        else:
            expect = up.cw_max
        if windows[j] != expect:
            audit.violation(
                f"UP{up.priority}: window at stage {j} is {windows[j]}, rule says {expect}"
            )


def run_simulation(
    scenario: Scenario,
    seed,
    horizon: float,
    trace=None,
    warmup_superframes: int = 2,
) -> SimStats:
    """Simulate whole superframes covering ``horizon`` seconds.

    ``seed`` is anything acceptable to numpy's SeedSequence; every node
    gets its own spawned substream.  ``trace``, if given, is a writable
    text stream receiving one line per protocol event.  The first
    ``warmup_superframes`` superframes are simulated but excluded from the
    statistics.
    """
    validate_feasible(scenario)
    phy = scenario.phy
    slot = phy.csma_slot
    sifs = phy.sifs
    saturated = scenario.traffic is Traffic.SATURATED
    per = packet_error_rate(scenario.ber, scenario.mechanism, phy, scenario.payload_bytes)
    dur = exchange_durations(phy, scenario.mechanism, scenario.payload_bytes)
    t_succ, t_coll = dur.t_succ, dur.t_coll
    sf_len = scenario.eap1_len + scenario.rap1_len
    n_sf = int(math.floor(horizon / sf_len + 1e-9))
    if n_sf < 1:
        raise ValidationError("horizon shorter than one superframe")

    windows = [window_schedule(up) for up in scenario.up_table]
    payload_bits = 8 * scenario.payload_bytes

    seq = np.random.SeedSequence(seed)
    children = seq.spawn(scenario.total_nodes)
    nodes: list[NodeState] = []
    node_id = 0
    for i, count in enumerate(scenario.node_counts):
        for _ in range(count):
            nodes.append(NodeState(node_id, i, np.random.default_rng(children[node_id])))
            node_id += 1

    stats = SimStats()
    audit = _Audit()
    for i in scenario.active_priorities():
        _check_window_rule(scenario.up_table[i], audit)

    arrivals: list[tuple[float, int]] = []
    for node in nodes:
        lam = scenario.arrival_rates[node.up_index]
        if saturated:
            node.has_frame = True
            node.stage = 0
            node.counter = int(node.rng.integers(1, windows[node.up_index][0] + 1))
            node.frame_birth = 0.0
        elif lam > 0:
            node.next_arrival = node.rng.exponential(1.0 / lam)
            heapq.heappush(arrivals, (node.next_arrival, node.node_id))

    # per-node own-exchange counts inside the accounting window
    own_succ = [0] * len(nodes)
    own_coll = [0] * len(nodes)
    own_err = [0] * len(nodes)

    eap_nodes = [n for n in nodes if n.up_index == 7]
    rap_nodes = nodes

    acct = False
    last_busy_end = -math.inf
    t = 0.0

    def emit(event, when, node=None):
        if trace is None:
            return
        if node is None:
            trace.write(f"{when:.9f} - - {event} - -\n")
        else:
            trace.write(
                f"{when:.9f} {node.node_id} {node.up_index} {event} "
                f"{node.stage} {node.counter}\n"
            )

    def give_frame(node: NodeState, when: float):
        node.has_frame = True
        node.stage = 0
        w0 = windows[node.up_index][0]
        node.counter = int(node.rng.integers(1, w0 + 1))
        node.frame_birth = when
        if node.counter < 1 or node.counter > w0:
            audit.violation(f"node {node.node_id}: counter draw outside [1, W0]")

    def process_arrivals(now: float):
        while arrivals and arrivals[0][0] <= now + _EPS:
            when, nid = heapq.heappop(arrivals)
            node = nodes[nid]
            stats.arrival_events += 1
            if node.has_frame:
                if acct:
                    stats.suppressed_arrivals[node.up_index] += 1
            else:
                give_frame(node, when)
                if acct:
                    stats.frames_generated[node.up_index] += 1
                emit("arrival", when, node)
            lam = scenario.arrival_rates[node.up_index]
            node.next_arrival = when + node.rng.exponential(1.0 / lam)
            heapq.heappush(arrivals, (node.next_arrival, nid))

    def resolve_failure(node: NodeState, when: float):
        up = scenario.up_table[node.up_index]
        if node.stage == up.max_stage:
            if acct:
                stats.drops[node.up_index] += 1
                stats.total_access_delay[node.up_index] += when - node.frame_birth
            emit("drop", when, node)
            if saturated:
                give_frame(node, when)
                if acct:
                    stats.frames_generated[node.up_index] += 1
            else:
                node.has_frame = False
        else:
            node.stage += 1
            w = cw_schedule(up, node.stage)
            node.counter = int(node.rng.integers(1, w + 1))

    def resolve_success(node: NodeState, when: float):
        if acct:
            stats.successes[node.up_index] += 1
            stats.total_access_delay[node.up_index] += when - node.frame_birth
            stats.payload_bits_delivered[node.up_index] += payload_bits
        emit("success", when, node)
        if saturated:
            give_frame(node, when)
            if acct:
                stats.frames_generated[node.up_index] += 1
        else:
            node.has_frame = False

    def run_phase(phase_nodes, phase_start, phase_end, label):
        nonlocal t, last_busy_end
        t = phase_start
        emit(f"phase_{label}", t)
        deadline = phase_end - t_succ
        while True:
            process_arrivals(t)
            remaining = phase_end - t
            if remaining < slot - _EPS:
                if acct:
                    stats.residue_time += max(0.0, remaining)
                break
            if t > deadline + _EPS:
                # too late for any exchange; the rest of the phase idles by
                whole = int(math.floor(remaining / slot + _EPS))
                if acct:
                    stats.idle_slot_time += whole * slot
                    stats.channel_intervals += whole
                    stats.residue_time += remaining - whole * slot
                t = phase_end
                process_arrivals(t)
                break
            if t - last_busy_end < sifs - _EPS:
                # first slot after a busy period: everyone still locked
                if acct:
                    stats.idle_slot_time += slot
                    stats.channel_intervals += 1
                t += slot
                continue

            transmitters = None
            min_k = None
            holders = 0
            for node in phase_nodes:
                if not node.has_frame:
                    continue
                holders += 1
                k = node.counter
                if k == 0:
                    if transmitters is None:
                        transmitters = [node]
                    else:
                        transmitters.append(node)
                elif min_k is None or k < min_k:
                    min_k = k

            if transmitters:
                n_tx = len(transmitters)
                duration = t_coll if n_tx >= 2 else t_succ
                end = t + duration
                for node in transmitters:
                    if label == "eap" and node.up_index != 7:
                        audit.violation(
                            f"UP{node.up_index} transmission inside EAP1"
                        )
                if end > phase_end + _EPS:
                    audit.violation("exchange extends past its phase boundary")
                stats.transmission_events += n_tx
                if acct:
                    stats.busy_time += duration
                    stats.channel_intervals += 1
                if n_tx >= 2:
                    for node in transmitters:
                        if acct:
                            stats.attempts[node.up_index] += 1
                            stats.collisions[node.up_index] += 1
                            own_coll[node.node_id] += 1
                        emit("collision", t, node)
                        resolve_failure(node, end)
                else:
                    node = transmitters[0]
                    errored = node.rng.random() < per
                    if acct:
                        stats.attempts[node.up_index] += 1
                    if errored:
                        if acct:
                            stats.error_transmissions[node.up_index] += 1
                            own_err[node.node_id] += 1
                        emit("error", t, node)
                        resolve_failure(node, end)
                    else:
                        if acct:
                            own_succ[node.node_id] += 1
                        resolve_success(node, end)
                last_busy_end = end
                t = end
                continue

            if holders == 0:
                next_arrival = arrivals[0][0] if arrivals else math.inf
                until = min(phase_end, max(next_arrival, t + slot))
                capacity = int(math.floor(remaining / slot + _EPS))
                whole = min(capacity, max(1, int(math.floor((until - t) / slot + _EPS))))
                if acct:
                    stats.idle_slot_time += whole * slot
                    stats.channel_intervals += whole
                t += whole * slot
                continue

            # idle stretch: every holder decrements once per slot, so the
            # next transmission is min_k slots away unless something else
            # (phase fit boundary, an arrival) changes the eligible set
            live = int(math.floor((deadline - t) / slot + _EPS)) + 1
            delta = min(min_k, live) if min_k is not None else live
            if arrivals:
                gap = arrivals[0][0] - t
                if gap > 0:
                    delta = min(delta, max(1, int(math.ceil(gap / slot - _EPS))))
            for node in phase_nodes:
                if node.has_frame:
                    node.counter -= min(delta, node.counter)
            stats.decrement_events += holders * delta
            if acct:
                stats.idle_slot_time += delta * slot
                stats.channel_intervals += delta
            t += delta * slot

    total_sf = warmup_superframes + n_sf
    acct_start = warmup_superframes * sf_len
    sf_start = 0.0
    for sf in range(total_sf):
        if not acct and sf == warmup_superframes:
            acct = True
            for node in nodes:
                if node.has_frame:
                    stats.frames_generated[node.up_index] += 1
        if scenario.eap1_len > 0:
            run_phase(eap_nodes, sf_start, sf_start + scenario.eap1_len, "eap")
        run_phase(rap_nodes, sf_start + scenario.eap1_len, sf_start + sf_len, "rap")
        sf_start += sf_len

    stats.simulated_time = n_sf * sf_len
    stats.superframes_elapsed = n_sf

    # Energy: idle power everywhere except the node's own exchanges, which
    # split into transmit/receive/idle frame parts by outcome.
    if scenario.mechanism is Mechanism.BASIC:
        tx_s, rx_s = dur.t_data, dur.t_ctrl
        tx_c, rx_c = dur.t_data, dur.t_ctrl
    else:
        tx_s, rx_s = dur.t_ctrl + dur.t_data, 2 * dur.t_ctrl
        tx_c, rx_c = dur.t_ctrl, dur.t_ctrl
    for node in nodes:
        i = node.up_index
        ns, nc, ne = own_succ[node.node_id], own_coll[node.node_id], own_err[node.node_id]
        tx_time = (ns + ne) * tx_s + nc * tx_c
        rx_time = (ns + ne) * rx_s + nc * rx_c
        stats.energy_tx[i] += phy.p_tx * tx_time
        stats.energy_rx[i] += phy.p_rx * rx_time
        stats.energy_idle[i] += phy.p_idle * (
            stats.simulated_time - tx_time - rx_time
        )

    stats.audit_violations = audit.count
    stats.audit_messages = tuple(audit.messages)
    return stats


def sim_metrics(stats: SimStats, scenario: Scenario) -> MetricsReport:
    """Empirical estimators of the four per-priority metrics.

    A priority with no resolved frames gets None entries rather than
    zeros.
    """
    rel, thr, ene, dly = [], [], [], []
    for i in range(NUM_PRIORITIES):
        n_i = scenario.node_counts[i]
        resolved = stats.successes[i] + stats.drops[i]
        if n_i == 0:
            rel.append(None)
            thr.append(None)
            ene.append(None)
            dly.append(None)
            continue
        if resolved == 0:
            rel.append(None)
            dly.append(None)
        else:
            rel.append(stats.successes[i] / resolved)
            dly.append(stats.total_access_delay[i] / resolved)
        airtime = stats.payload_bits_delivered[i] / scenario.phy.psdu_rate
        thr.append(airtime / stats.simulated_time if stats.simulated_time > 0 else None)
        energy = stats.energy_tx[i] + stats.energy_rx[i] + stats.energy_idle[i]
        if stats.channel_intervals > 0:
            ene.append(energy / n_i / stats.channel_intervals)
        else:
            ene.append(None)
    return MetricsReport(
        reliability=tuple(rel),
        throughput=tuple(thr),
        energy=tuple(ene),
        delay=tuple(dly),
    )


def _replication_job(args):
    scenario, seed_entropy, horizon = args
    return run_simulation(scenario, seed_entropy, horizon)


def run_replications(
    scenario: Scenario,
    seed: int,
    horizon: float,
    replications: int,
    parallel: int = 1,
) -> list[SimStats]:
    """Independent replications with per-replication derived seeds."""
    jobs = [(scenario, (seed, rep), horizon) for rep in range(replications)]
    if parallel > 1 and replications > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_replication_job, jobs))
    return [_replication_job(job) for job in jobs]


def summarize_replications(reports: list[MetricsReport]):
    """Mean report plus normal-approximation 95% half-widths."""

    def column(values):
        mean, half = [], []
        for i in range(NUM_PRIORITIES):
            xs = [v[i] for v in values if v[i] is not None]
            if not xs:
                mean.append(None)
                half.append(None)
                continue
            mu = sum(xs) / len(xs)
            mean.append(mu)
            if len(xs) > 1:
                var = sum((x - mu) ** 2 for x in xs) / (len(xs) - 1)
                half.append(1.96 * math.sqrt(var / len(xs)))
            else:
                half.append(0.0)
        return tuple(mean), tuple(half)

    rel_m, rel_h = column([r.reliability for r in reports])
    thr_m, thr_h = column([r.throughput for r in reports])
    ene_m, ene_h = column([r.energy for r in reports])
    dly_m, dly_h = column([r.delay for r in reports])
    mean = MetricsReport(reliability=rel_m, throughput=thr_m, energy=ene_m, delay=dly_m)
    half = MetricsReport(reliability=rel_h, throughput=thr_h, energy=ene_h, delay=dly_h)
    return mean, half
