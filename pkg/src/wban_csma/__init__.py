"""Performance toolkit for IEEE 802.15.6 CSMA/CA: a Markov-chain analytical
model solved by fixed-point iteration, cross-validated against a
discrete-event simulation of the backoff protocol."""

from .config import SweepParameter, SweepSpec, apply_sweep_value, parse_config
from .core import (
    ExchangeDurations,
    control_frame_duration,
    cw_schedule,
    data_frame_bits,
    data_frame_duration,
    exchange_durations,
    lock_probability,
    mean_backoff,
    packet_error_rate,
    validate_feasible,
    window_schedule,
)
from .errors import (
    BlockedChannelError,
    CompareError,
    ConfigParseError,
    ConvergenceError,
    InfeasiblePhaseError,
    StageRangeError,
    StaleStateError,
    ValidationError,
    WbanCsmaError,
)
from .metrics import (
    MetricsReport,
    analytical_metrics,
    average_access_delay,
    energy_consumption,
    normalized_throughput,
    reliability,
)
from .params import (
    DEFAULT_PHY,
    DEFAULT_UP_TABLE,
    Mechanism,
    PhyMacConfig,
    Scenario,
    Traffic,
    UserPriorityParams,
    uniform_scenario,
)
from .presets import base_scenario, preset
from .sim import (
    NodeState,
    SimStats,
    run_replications,
    run_simulation,
    sim_metrics,
    summarize_replications,
)
from .solver import (
    SolutionState,
    StationaryDistribution,
    expected_state_time,
    node_conditional_probs,
    phase_transmission_probs,
    queue_nonempty_prob,
    solve_fixed_point,
    stationary_distribution,
    tau_from_state,
)
from .sweep import (
    DEFAULT_TOLERANCES,
    ComparisonReport,
    MetricTolerance,
    ResultTable,
    SweepMode,
    compare,
    relative_deviation,
    run_sweep,
)

__version__ = "1.0.0"
