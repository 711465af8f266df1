"""Exception types shared across the toolkit."""


class WbanCsmaError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(WbanCsmaError):
    """A parameter or scenario violates one of its invariants."""


class StageRangeError(WbanCsmaError):
    """Backoff stage index outside [0, m + x]."""


class InfeasiblePhaseError(WbanCsmaError):
    """Access phase too short to fit a single frame exchange."""


class BlockedChannelError(WbanCsmaError):
    """Per-slot idle probability collapsed to zero; backoff cannot advance."""


class ConvergenceError(WbanCsmaError):
    """Fixed-point iteration did not reach tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class StaleStateError(WbanCsmaError):
    """Operation requires a converged solution."""


class ConfigParseError(WbanCsmaError):
    """Config file is not well-formed (reported with line numbers)."""


class CompareError(WbanCsmaError):
    """Analytical and simulated result sets do not share the same keys."""
