"""Exception types shared across the package."""


class PcmForgeError(Exception):
    """Base class for all package errors."""


class ValidationError(PcmForgeError, ValueError):
    """A value violates a documented domain restriction."""


class PlantInfeasibleError(PcmForgeError):
    """The commanded operating point has no physical solution.

    Canonical case: zero flow through the heat-exchanger branch while a
    positive heat rejection is commanded.
    """


class NumericalError(PcmForgeError):
    """A linear solve failed outside the handled degenerate cases."""


class ProfileFormatError(PcmForgeError, ValueError):
    """A disturbance-profile CSV is malformed."""


class ConfigError(PcmForgeError, ValueError):
    """A scenario config file is malformed or inconsistent."""


class SolverEvalError(PcmForgeError):
    """Every solver start failed to evaluate the problem."""
