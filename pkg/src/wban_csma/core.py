"""Closed-form protocol quantities that depend only on configuration.

Everything here is static for a given scenario: the contention-window
schedule over backoff stages, frame and exchange air times, the packet
error rate implied by the channel BER, and the counter-lock probability
near access-phase boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasiblePhaseError, StageRangeError, ValidationError
from .params import Mechanism, PhyMacConfig, Scenario, UserPriorityParams


def cw_schedule(up: UserPriorityParams, j: int) -> int:
    """Contention window at backoff stage ``j``.

    The window starts at ``cw_min``, doubles after every even-numbered
    stage up to stage ``m``, and sits at ``cw_max`` for the remaining
    ``x`` stages.
    """
    if j < 0 or j > up.max_stage:
        raise StageRangeError(
            f"backoff stage {j} outside [0, {up.max_stage}] for UP{up.priority}"
        )
    if j <= up.m:
        return up.cw_min * 2 ** (j // 2)
    return up.cw_max


def window_schedule(up: UserPriorityParams) -> tuple[int, ...]:
    """Window sizes for all stages 0 .. m + x."""
    return tuple(cw_schedule(up, j) for j in range(up.num_stages))


def mean_backoff(up: UserPriorityParams) -> float:
    """Mean backoff draw in slots, averaged over all backoff stages."""
    windows = window_schedule(up)
    return sum((w + 1) / 2 for w in windows) / len(windows)


def data_frame_bits(phy: PhyMacConfig, payload_bytes: int) -> int:
    """Full over-the-air length of a data frame in bits."""
    return (
        phy.preamble_bits
        + phy.phy_header_bits
        + phy.mac_header_bits
        + 8 * payload_bytes
        + phy.fcs_bits
    )


def data_frame_duration(phy: PhyMacConfig, payload_bytes: int) -> float:
    """Air time of a data frame in seconds.

    Header/FCS sizes are configured in bits; only the payload is in bytes.
    """
    if payload_bytes < 0:
        raise ValidationError("payload_bytes must be nonnegative")
    return (
        phy.preamble_bits / phy.symbol_rate
        + phy.phy_header_bits / phy.plcp_rate
        + (phy.mac_header_bits + 8 * payload_bytes + phy.fcs_bits) / phy.psdu_rate
    )


def control_frame_duration(phy: PhyMacConfig) -> float:
    """Air time of an RTS, CTS or ACK frame (all share one length)."""
    return data_frame_duration(phy, 0)


def packet_error_rate(
    ber: float, mechanism: Mechanism, phy: PhyMacConfig, payload_bytes: int
) -> float:
    """Probability that at least one bit of a frame exchange is corrupted.

    The exposed length covers every frame of the exchange including
    preamble and PHY header bits (the 193-bit control frames plus the
    data frame).
    """
    if not 0.0 <= ber <= 1.0:
        raise ValidationError("ber outside [0,1]")
    exposed = data_frame_bits(phy, payload_bytes) + phy.ctrl_frame_bits
    if mechanism is Mechanism.RTS_CTS:
        exposed += 2 * phy.ctrl_frame_bits
    per = 1.0 - (1.0 - ber) ** exposed
    return min(1.0, max(0.0, per))


@dataclass(frozen=True)
class ExchangeDurations:
    """Wall-clock cost of the three exchange outcomes, in seconds."""

    t_data: float
    t_ctrl: float
    t_succ: float
    t_coll: float
    t_error: float
    l_succ_slots: int


def exchange_durations(
    phy: PhyMacConfig, mechanism: Mechanism, payload_bytes: int
) -> ExchangeDurations:
    """Durations of successful, collided and errored exchanges.

    With the basic mechanism every outcome occupies the full data + ACK
    window; with RTS/CTS a collision is detected after the unanswered RTS.
    """
    t_data = data_frame_duration(phy, payload_bytes)
    t_ctrl = control_frame_duration(phy)
    alpha = phy.prop_delay
    if mechanism is Mechanism.BASIC:
        t_succ = t_data + t_ctrl + phy.sifs + 2 * alpha
        t_coll = t_succ
    else:
        t_succ = 2 * t_ctrl + t_data + t_ctrl + 3 * phy.sifs + 4 * alpha
        t_coll = 2 * t_ctrl + phy.sifs + 2 * alpha
    l_succ = int(math.ceil(t_succ / phy.csma_slot - 1e-9))
    return ExchangeDurations(
        t_data=t_data,
        t_ctrl=t_ctrl,
        t_succ=t_succ,
        t_coll=t_coll,
        t_error=t_succ,
        l_succ_slots=l_succ,
    )


def lock_probability(
    up: UserPriorityParams,
    eap_slots: int,
    rap_slots: int,
    l_succ_slots: int,
    mean_backoff_slots: float,
) -> float:
    """Per-slot probability that the counter freezes for phase-boundary
    reasons.

    UP7 contends inside each phase separately; the lower priorities see
    the combined phase budget.
    """
    if up.priority == 7:
        denom = rap_slots - l_succ_slots - mean_backoff_slots
    else:
        denom = eap_slots + rap_slots - l_succ_slots - mean_backoff_slots
    if denom <= 0:
        raise InfeasiblePhaseError(
            f"UP{up.priority}: permitted phase ({denom:+.1f} spare slots) is "
            "shorter than one transmission plus mean backoff"
        )
    return min(1.0, 1.0 / denom)


def validate_feasible(scenario: Scenario) -> None:
    """Reject scenarios whose phases cannot fit a single exchange."""
    dur = exchange_durations(scenario.phy, scenario.mechanism, scenario.payload_bytes)
    active = scenario.active_priorities()
    if not active:
        return
    lower_active = any(i < 7 for i in active)
    if lower_active and dur.t_succ > scenario.rap1_len:
        raise InfeasiblePhaseError(
            "random access phase shorter than one frame exchange"
        )
    if 7 in active and dur.t_succ > max(scenario.eap1_len, scenario.rap1_len):
        raise InfeasiblePhaseError(
            "no access phase long enough for a UP7 frame exchange"
        )
    for i in active:
        lock_probability(
            scenario.up_table[i],
            scenario.eap_slots,
            scenario.rap_slots,
            dur.l_succ_slots,
            mean_backoff(scenario.up_table[i]),
        )
