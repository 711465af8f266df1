"""Configuration types: per-priority MAC parameters, PHY/MAC attributes and
experiment scenarios.

The default tables correspond to the narrowband PHY of IEEE 802.15.6 beacon
mode: eight user priorities (UP0 lowest .. UP7 highest) differentiated by
their contention-window bounds, and the usual 2.4 GHz timing/power figures.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError

MAX_BAN_SIZE = 64
NUM_PRIORITIES = 8


class Mechanism(Enum):
    BASIC = "basic"
    RTS_CTS = "rtscts"


class Traffic(Enum):
    SATURATED = "saturated"
    NON_SATURATED = "nonsaturated"


@dataclass(frozen=True)
class UserPriorityParams:
    """Contention parameters of one user priority.

    ``m`` counts the window-doubling backoff stages, ``x`` the additional
    stages spent at ``cw_max``; a frame is dropped after ``m + x + 1``
    failed attempts.
    """

    priority: int
    cw_min: int
    cw_max: int
    m: int
    x: int

    def __post_init__(self):
        if not 0 <= self.priority < NUM_PRIORITIES:
            raise ValidationError(f"priority {self.priority} outside 0..7")
        if self.cw_min < 1:
            raise ValidationError("cw_min must be >= 1")
        if self.cw_min > self.cw_max:
            raise ValidationError("cw_min must not exceed cw_max")
        if self.m < 0 or self.x < 0:
            raise ValidationError("stage counts m, x must be nonnegative")
        if self.m % 2:
            raise ValidationError("m must be even (windows double after even stages)")

    @property
    def max_stage(self) -> int:
        return self.m + self.x

    @property
    def num_stages(self) -> int:
        return self.m + self.x + 1


#: Default per-priority MAC parameters (background traffic first, emergency
#: report last).  Note the UP7 row: cw_max = 4 is larger than the window the
#: doubling rule reaches at stage m (2), so the cap branch is a real jump.
DEFAULT_UP_TABLE: tuple[UserPriorityParams, ...] = (
    UserPriorityParams(0, 16, 64, 4, 3),
    UserPriorityParams(1, 16, 32, 2, 5),
    UserPriorityParams(2, 8, 32, 4, 3),
    UserPriorityParams(3, 8, 16, 2, 5),
    UserPriorityParams(4, 4, 16, 4, 3),
    UserPriorityParams(5, 4, 8, 2, 5),
    UserPriorityParams(6, 2, 8, 4, 3),
    UserPriorityParams(7, 1, 4, 2, 5),
)


@dataclass(frozen=True)
class PhyMacConfig:
    """PHY/MAC timing, frame-size and power attributes.

    Frame-part sizes are in bits; the preamble is sent at the symbol rate,
    the PHY header at the PLCP rate and the MAC body at the PSDU rate.
    """

    preamble_bits: int = 90
    phy_header_bits: int = 31
    mac_header_bits: int = 56
    fcs_bits: int = 16
    ctrl_frame_bits: int = 193
    symbol_rate: float = 600e3
    plcp_rate: float = 91.9e3
    psdu_rate: float = 971.4e3
    csma_slot: float = 125e-6
    sifs: float = 75e-6
    prop_delay: float = 1e-6
    p_tx: float = 27e-3
    p_rx: float = 1.8e-3
    p_idle: float = 5e-6
    retry_limit: int = 7

    def __post_init__(self):
        for name in ("symbol_rate", "plcp_rate", "psdu_rate", "csma_slot", "sifs"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be strictly positive")
        if self.prop_delay < 0:
            raise ValidationError("prop_delay must be nonnegative")
        for name in ("p_tx", "p_rx", "p_idle"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be nonnegative")
        header_bits = (
            self.preamble_bits
            + self.phy_header_bits
            + self.mac_header_bits
            + self.fcs_bits
        )
        if self.ctrl_frame_bits != header_bits:
            raise ValidationError(
                "ctrl_frame_bits must equal preamble + PHY header + MAC header "
                f"+ FCS ({header_bits}), got {self.ctrl_frame_bits}"
            )


DEFAULT_PHY = PhyMacConfig()


def _as_rate_tuple(rates) -> tuple[float, ...]:
    if isinstance(rates, (int, float)):
        return (float(rates),) * NUM_PRIORITIES
    rates = tuple(float(r) for r in rates)
    if len(rates) != NUM_PRIORITIES:
        raise ValidationError("arrival_rates must be a scalar or 8 values")
    return rates


@dataclass(frozen=True)
class Scenario:
    """One complete experiment configuration."""

    node_counts: tuple[int, ...]
    arrival_rates: tuple[float, ...] = (2.0,) * NUM_PRIORITIES
    ber: float = 0.0
    payload_bytes: int = 100
    eap1_len: float = 0.1
    rap1_len: float = 0.8
    mechanism: Mechanism = Mechanism.RTS_CTS
    traffic: Traffic = Traffic.SATURATED
    phy: PhyMacConfig = DEFAULT_PHY
    up_table: tuple[UserPriorityParams, ...] = DEFAULT_UP_TABLE

    def __post_init__(self):
        object.__setattr__(self, "node_counts", tuple(int(n) for n in self.node_counts))
        object.__setattr__(self, "arrival_rates", _as_rate_tuple(self.arrival_rates))
        if len(self.node_counts) != NUM_PRIORITIES:
            raise ValidationError("node_counts must hold one entry per priority")
        if any(n < 0 for n in self.node_counts):
            raise ValidationError("node counts must be nonnegative")
        if sum(self.node_counts) > MAX_BAN_SIZE:
            raise ValidationError(f"total nodes must not exceed {MAX_BAN_SIZE}")
        if any(r < 0 for r in self.arrival_rates):
            raise ValidationError("arrival rates must be nonnegative")
        if not 0.0 <= self.ber <= 1.0:
            raise ValidationError("ber outside [0,1]")
        if self.payload_bytes < 0:
            raise ValidationError("payload_bytes must be nonnegative")
        if self.eap1_len < 0:
            raise ValidationError("eap1_len must be nonnegative")
        if self.rap1_len <= 0:
            raise ValidationError("rap1_len must be strictly positive")
        if len(self.up_table) != NUM_PRIORITIES:
            raise ValidationError("up_table must hold 8 rows")
        for i, up in enumerate(self.up_table):
            if up.priority != i:
                raise ValidationError("up_table rows must be ordered UP0..UP7")

    @property
    def total_nodes(self) -> int:
        return sum(self.node_counts)

    def active_priorities(self) -> tuple[int, ...]:
        return tuple(i for i, n in enumerate(self.node_counts) if n > 0)

    @property
    def eap_slots(self) -> int:
        return phase_slots(self.eap1_len, self.phy.csma_slot)

    @property
    def rap_slots(self) -> int:
        return phase_slots(self.rap1_len, self.phy.csma_slot)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


def phase_slots(length_s: float, csma_slot: float) -> int:
    """Whole CSMA slots contained in a phase of the given duration."""
    return int(math.floor(length_s / csma_slot + 1e-9))


def uniform_scenario(nodes_per_up: int, **changes) -> Scenario:
    """Scenario with the same node count in every priority."""
    return Scenario(node_counts=(nodes_per_up,) * NUM_PRIORITIES, **changes)
