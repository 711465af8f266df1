"""Coupled-probability fixed point of the per-priority backoff model.

For each active priority the model ties together the per-slot transmission
probability tau, the queue-nonempty probability rho and the per-attempt
failure probability; the channel couples all priorities through the
phase-wise busy probabilities and the expected per-state times.  All of
those quantities are closed-form functions of the tau vector, so the solve
is a damped fixed-point iteration on tau with everything else re-derived
each step.  Residuals are measured as the change of the full monitored
vector (tau, rho, p_fail, p_idle, expected state times) under one more
re-evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    ExchangeDurations,
    exchange_durations,
    lock_probability,
    mean_backoff,
    packet_error_rate,
    validate_feasible,
    window_schedule,
)
from .errors import (
    BlockedChannelError,
    ConvergenceError,
    StaleStateError,
    ValidationError,
)
from .params import NUM_PRIORITIES, Scenario, Traffic, UserPriorityParams

_CLAMP_NOTE = 1e-9


def _clamp(value: float, label: str, diagnostics: list | None) -> float:
    clamped = min(1.0, max(0.0, value))
    if diagnostics is not None and abs(clamped - value) > _CLAMP_NOTE:
        diagnostics.append(f"clamped {label} from {value!r}")
    return clamped


@dataclass(frozen=True)
class PhaseTransmission:
    """Channel-wide busy/idle probabilities of a CSMA slot per phase."""

    p_tran_eap: float
    p_tran_rap: float
    p_idle_eap: float
    p_idle_rap: float


def phase_transmission_probs(taus, node_counts) -> PhaseTransmission:
    """Probability that at least one node transmits in a slot of each phase."""
    prod_rap = 1.0
    for tau, n in zip(taus, node_counts):
        if n > 0:
            if not 0.0 <= tau <= 1.0:
                raise ValidationError(f"tau {tau} outside [0,1]")
            prod_rap *= (1.0 - tau) ** n
    n7 = node_counts[7]
    pow_eap = (1.0 - taus[7]) ** n7 if n7 > 0 else 1.0
    return PhaseTransmission(
        p_tran_eap=1.0 - pow_eap,
        p_tran_rap=1.0 - prod_rap,
        p_idle_eap=pow_eap,
        p_idle_rap=prod_rap,
    )


@dataclass(frozen=True)
class NodeProbs:
    """Conditional per-slot probabilities seen by one priority class.

    ``idle`` is the probability the class may decrement its counter in a
    slot (others silent, counter not locked).  The ``*_rap``/``*_eap``
    fields condition on a busy slot of that phase; UP7 additionally gets
    the phase-length-weighted mixture in the unsuffixed fields, which for
    the lower priorities simply equal the RAP values.
    """

    idle: float
    acce_rap: float
    succ_rap: float
    coll_rap: float
    error_rap: float
    fail_rap: float
    acce_eap: float
    succ_eap: float
    coll_eap: float
    error_eap: float
    fail_eap: float
    acce: float
    succ: float
    coll: float
    error: float
    fail: float


def node_conditional_probs(
    up_index: int,
    taus,
    node_counts,
    per: float,
    phase_weights,
    p_lock: float = 0.0,
    diagnostics: list | None = None,
) -> NodeProbs:
    """Access/success/collision/error probabilities for one priority.

    ``phase_weights`` is the (eap, rap) phase-length split used to mix the
    two phases for UP7.  When a phase has zero busy probability its access
    probability is defined as zero.
    """
    tau_i = taus[up_index]
    n_i = node_counts[up_index]
    if tau_i >= 1.0:
        raise ValidationError(f"tau[{up_index}] = 1 makes conditionals degenerate")
    if n_i <= 0:
        raise ValidationError(f"UP{up_index} has no nodes")
    pt = phase_transmission_probs(taus, node_counts)
    own = 1.0 - tau_i

    cond_idle_rap = pt.p_idle_rap / own
    if pt.p_tran_rap > 0.0:
        acce_rap = n_i * tau_i * pt.p_idle_rap / (own * pt.p_tran_rap)
    else:
        acce_rap = 0.0
        if diagnostics is not None:
            diagnostics.append(f"UP{up_index}: p_tran_rap = 0, access defined as 0")
    acce_rap = _clamp(acce_rap, f"p_acce_rap[{up_index}]", diagnostics)
    succ_rap = acce_rap * (1.0 - per)
    coll_rap = 1.0 - acce_rap
    error_rap = acce_rap * per
    fail_rap = coll_rap + error_rap

    if up_index == 7:
        w_eap, w_rap = phase_weights
        pow_eap = pt.p_idle_eap
        cond_idle_eap = pow_eap / own
        if pt.p_tran_eap > 0.0:
            acce_eap = n_i * tau_i * pow_eap / (own * pt.p_tran_eap)
        else:
            acce_eap = 0.0
            if diagnostics is not None:
                diagnostics.append("UP7: p_tran_eap = 0, access defined as 0")
        acce_eap = _clamp(acce_eap, "p_acce_eap[7]", diagnostics)
        succ_eap = acce_eap * (1.0 - per)
        coll_eap = 1.0 - acce_eap
        error_eap = acce_eap * per
        fail_eap = coll_eap + error_eap
        idle = (w_eap * cond_idle_eap + w_rap * cond_idle_rap) * (1.0 - p_lock)
        acce = w_eap * acce_eap + w_rap * acce_rap
        succ = w_eap * succ_eap + w_rap * succ_rap
        coll = w_eap * coll_eap + w_rap * coll_rap
        error = w_eap * error_eap + w_rap * error_rap
        fail = w_eap * fail_eap + w_rap * fail_rap
    else:
        acce_eap = succ_eap = error_eap = 0.0
        coll_eap = fail_eap = 0.0
        idle = cond_idle_rap * (1.0 - p_lock)
        acce, succ, coll, error, fail = acce_rap, succ_rap, coll_rap, error_rap, fail_rap

    return NodeProbs(
        idle=_clamp(idle, f"p_idle[{up_index}]", diagnostics),
        acce_rap=acce_rap,
        succ_rap=succ_rap,
        coll_rap=coll_rap,
        error_rap=error_rap,
        fail_rap=fail_rap,
        acce_eap=acce_eap,
        succ_eap=succ_eap,
        coll_eap=coll_eap,
        error_eap=error_eap,
        fail_eap=fail_eap,
        acce=acce,
        succ=succ,
        coll=coll,
        error=error,
        fail=fail,
    )


@dataclass(frozen=True)
class StateTimes:
    """Expected wall-clock duration of one model state, per phase and UP."""

    t_e_eap: float
    t_e_rap: float
    t_e: tuple


def expected_state_time(
    phase_probs: PhaseTransmission,
    node_probs,
    durations: ExchangeDurations,
    csma_slot: float,
    phase_weights,
) -> StateTimes:
    """Mean state time: an idle slot, or the busy outcome mix of the phase.

    ``node_probs`` holds a NodeProbs per priority (None for inactive
    classes); the phase sums run over the active classes only.
    """
    sum_succ = sum(np.succ_rap for np in node_probs if np is not None)
    sum_coll = sum(np.coll_rap for np in node_probs if np is not None)
    sum_error = sum(np.error_rap for np in node_probs if np is not None)
    t_e_rap = (
        csma_slot * (1.0 - phase_probs.p_tran_rap)
        + durations.t_succ * phase_probs.p_tran_rap * sum_succ
        + durations.t_coll * phase_probs.p_tran_rap * sum_coll
        + durations.t_error * phase_probs.p_tran_rap * sum_error
    )
    np7 = node_probs[7]
    if np7 is not None:
        t_e_eap = (
            csma_slot * (1.0 - phase_probs.p_tran_eap)
            + durations.t_succ * phase_probs.p_tran_eap * np7.succ_eap
            + durations.t_coll * phase_probs.p_tran_eap * np7.coll_eap
            + durations.t_error * phase_probs.p_tran_eap * np7.error_eap
        )
    else:
        t_e_eap = csma_slot
    w_eap, w_rap = phase_weights
    t_e = []
    for i, np_i in enumerate(node_probs):
        if np_i is None:
            t_e.append(0.0)
        elif i == 7:
            t_e.append(w_eap * t_e_eap + w_rap * t_e_rap)
        else:
            t_e.append(t_e_rap)
    return StateTimes(t_e_eap=t_e_eap, t_e_rap=t_e_rap, t_e=tuple(t_e))


def queue_nonempty_prob(lam: float, t_e: float, traffic: Traffic) -> float:
    """Probability that a node holds a frame at a state boundary."""
    if traffic is Traffic.SATURATED:
        return 1.0
    if lam < 0:
        raise ValidationError("arrival rate must be nonnegative")
    return 1.0 - math.exp(-lam * t_e)


def tau_from_state(up: UserPriorityParams, p_fail: float, p_idle: float, rho: float):
    """Stationary (i,0,0) probability and transmission probability.

    Returns ``(b000, tau)``.  A node that never holds traffic (rho = 0)
    never transmits.
    """
    if rho == 0.0:
        return 0.0, 0.0
    if p_idle <= 0.0:
        raise BlockedChannelError(
            f"UP{up.priority}: zero idle probability blocks the backoff counter"
        )
    windows = window_schedule(up)
    geo = 0.0
    dwell = 0.0
    power = 1.0
    for w in windows:
        geo += power
        dwell += (w + 1) / 2 * power
        power *= p_fail
    denom = geo + dwell / p_idle + (1.0 - rho) / rho
    b000 = 1.0 / denom
    return b000, b000 * geo


@dataclass(frozen=True)
class SolutionState:
    """Converged fixed point plus the derived probability family."""

    scenario: Scenario
    active: tuple
    tau: tuple
    rho: tuple
    b000: tuple
    p_idle: tuple
    p_lock: tuple
    p_fail: tuple
    p_acce: tuple
    p_succ: tuple
    p_coll: tuple
    p_error: tuple
    p_acce_rap: tuple
    p_succ_rap: tuple
    p_coll_rap: tuple
    p_error_rap: tuple
    p_acce_eap: tuple
    p_succ_eap: tuple
    p_coll_eap: tuple
    p_error_eap: tuple
    t_e: tuple
    p_tran_eap: float
    p_tran_rap: float
    p_idle_eap: float
    p_idle_rap: float
    t_e_eap: float
    t_e_rap: float
    per: float
    iterations: int
    residual: float
    converged: bool
    diagnostics: tuple


class _Model:
    """Static tables plus the tau -> derived-quantities evaluation."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.active = scenario.active_priorities()
        self.n = scenario.node_counts
        self.durations = exchange_durations(
            scenario.phy, scenario.mechanism, scenario.payload_bytes
        )
        self.per = packet_error_rate(
            scenario.ber, scenario.mechanism, scenario.phy, scenario.payload_bytes
        )
        self.slot = scenario.phy.csma_slot
        eap_slots, rap_slots = scenario.eap_slots, scenario.rap_slots
        total = eap_slots + rap_slots
        self.weights = (eap_slots / total, rap_slots / total)
        self.p_lock = [0.0] * NUM_PRIORITIES
        for i in self.active:
            self.p_lock[i] = lock_probability(
                scenario.up_table[i],
                eap_slots,
                rap_slots,
                self.durations.l_succ_slots,
                mean_backoff(scenario.up_table[i]),
            )

    def derived(self, taus, diagnostics=None):
        """Evaluate every model quantity implied by the tau vector."""
        scenario = self.scenario
        pt = phase_transmission_probs(taus, self.n)
        node_probs = [None] * NUM_PRIORITIES
        for i in self.active:
            node_probs[i] = node_conditional_probs(
                i,
                taus,
                self.n,
                self.per,
                self.weights,
                p_lock=self.p_lock[i],
                diagnostics=diagnostics,
            )
        st = expected_state_time(pt, node_probs, self.durations, self.slot, self.weights)
        rho = [0.0] * NUM_PRIORITIES
        tau_next = [0.0] * NUM_PRIORITIES
        b000 = [0.0] * NUM_PRIORITIES
        for i in self.active:
            rho[i] = queue_nonempty_prob(
                scenario.arrival_rates[i], st.t_e[i], scenario.traffic
            )
            b000[i], tau_next[i] = tau_from_state(
                scenario.up_table[i], node_probs[i].fail, node_probs[i].idle, rho[i]
            )
        return pt, node_probs, st, rho, b000, tau_next


def solve_fixed_point(
    scenario: Scenario,
    tau_init: float = 1e-2,
    tol: float = 1e-10,
    max_iterations: int = 200_000,
    damping: float = 0.1,
    damping_min: float = 1e-3,
) -> SolutionState:
    """Solve the coupled probability system by damped fixed-point iteration.

    Starts from tau = ``tau_init`` (rho = 1, p_fail = 0), updates
    tau <- (1 - gamma) tau + gamma F(tau) with gamma = ``damping``, and
    halves gamma (down to ``damping_min``) whenever the residual has not
    decreased over a 1000-iteration window.
    """
    validate_feasible(scenario)
    model = _Model(scenario)
    active = model.active
    if not active:
        return _build_solution(
            model, [0.0] * NUM_PRIORITIES, iterations=1, residual=0.0
        )

    taus = [0.0] * NUM_PRIORITIES
    for i in active:
        taus[i] = tau_init
    prev_monitor = None
    gamma = damping
    check_window = 1000
    checkpoint_residual = math.inf
    residual = math.inf

    for iteration in range(1, max_iterations + 1):
        pt, node_probs, st, rho, _, tau_next = model.derived(taus)
        monitor = (
            tuple(tau_next[i] for i in active),
            tuple(rho[i] for i in active),
            tuple(node_probs[i].fail for i in active),
            tuple(node_probs[i].idle for i in active),
            (st.t_e_eap, st.t_e_rap),
        )
        residual = max(abs(tau_next[i] - taus[i]) for i in active)
        if prev_monitor is not None:
            for new_block, old_block in zip(monitor[1:], prev_monitor[1:]):
                residual = max(
                    residual,
                    max(abs(a - b) for a, b in zip(new_block, old_block)),
                )
        prev_monitor = monitor
        if residual < tol:
            return _build_solution(model, taus, iterations=iteration, residual=residual)
        for i in active:
            taus[i] += gamma * (tau_next[i] - taus[i])
        if iteration % check_window == 0:
            if residual >= checkpoint_residual:
                gamma = max(gamma / 2.0, damping_min)
            checkpoint_residual = residual

    raise ConvergenceError(
        f"no fixed point after {max_iterations} iterations "
        f"(last residual {residual:.3e})",
        residual=residual,
        iterations=max_iterations,
    )


def _build_solution(model: _Model, taus, iterations: int, residual: float) -> SolutionState:
    diagnostics: list[str] = []
    pt, node_probs, st, rho, b000, tau_next = model.derived(taus, diagnostics)

    def per_up(attr):
        return tuple(
            getattr(node_probs[i], attr) if node_probs[i] is not None else 0.0
            for i in range(NUM_PRIORITIES)
        )

    return SolutionState(
        scenario=model.scenario,
        active=model.active,
        tau=tuple(taus),
        rho=tuple(rho),
        b000=tuple(b000),
        p_idle=per_up("idle"),
        p_lock=tuple(model.p_lock),
        p_fail=per_up("fail"),
        p_acce=per_up("acce"),
        p_succ=per_up("succ"),
        p_coll=per_up("coll"),
        p_error=per_up("error"),
        p_acce_rap=per_up("acce_rap"),
        p_succ_rap=per_up("succ_rap"),
        p_coll_rap=per_up("coll_rap"),
        p_error_rap=per_up("error_rap"),
        p_acce_eap=per_up("acce_eap"),
        p_succ_eap=per_up("succ_eap"),
        p_coll_eap=per_up("coll_eap"),
        p_error_eap=per_up("error_eap"),
        t_e=st.t_e,
        p_tran_eap=pt.p_tran_eap,
        p_tran_rap=pt.p_tran_rap,
        p_idle_eap=pt.p_idle_eap,
        p_idle_rap=pt.p_idle_rap,
        t_e_eap=st.t_e_eap,
        t_e_rap=st.t_e_rap,
        per=model.per,
        iterations=iterations,
        residual=residual,
        converged=True,
        diagnostics=tuple(diagnostics),
    )


@dataclass(frozen=True)
class StationaryDistribution:
    """Backoff-chain occupancy of one priority, reconstructed stage by stage.

    ``levels[j][k]`` is the stationary probability of counter value ``k``
    at stage ``j``; ``empty`` is the no-frame state.
    """

    levels: tuple
    empty: float

    def total(self) -> float:
        return self.empty + sum(sum(level) for level in self.levels)


def stationary_distribution(up_index: int, solution: SolutionState) -> StationaryDistribution:
    """Rebuild the full per-state distribution from the converged solution."""
    if not solution.converged:
        raise StaleStateError("stationary distribution requires a converged solution")
    if up_index not in solution.active:
        raise ValidationError(f"UP{up_index} has no nodes in this scenario")
    up = solution.scenario.up_table[up_index]
    b000 = solution.b000[up_index]
    p_fail = solution.p_fail[up_index]
    p_idle = solution.p_idle[up_index]
    rho = solution.rho[up_index]
    windows = window_schedule(up)
    levels = []
    power = 1.0
    for w in windows:
        level = [power * b000]
        scale = power * b000 / p_idle
        for k in range(1, w + 1):
            level.append((w - k + 1) / w * scale)
        levels.append(tuple(level))
        power *= p_fail
    empty = 1.0 if rho == 0.0 else (1.0 - rho) / rho * b000
    return StationaryDistribution(levels=tuple(levels), empty=empty)
