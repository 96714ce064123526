"""Exception hierarchy shared by all micromixer modules."""


class MicromixerError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(MicromixerError, ValueError):
    """A scalar argument is outside its physical range."""


class ConfigError(MicromixerError, ValueError):
    """One or more configuration invariants are violated.

    All violations are collected in ``violations`` rather than stopping at
    the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid configuration")


class DomainError(MicromixerError, ValueError):
    """A point lies outside the wetted channel domain."""


class BoilingRegimeError(MicromixerError):
    """Cavity temperature reached the boiling point (bubble regime, not modeled)."""


class ConvergenceError(MicromixerError):
    """The thermal response did not reach a steady periodic state."""


class InsufficientSamplingError(MicromixerError):
    """Too many empty bins to build a meaningful concentration profile."""


class InterfaceTruncationError(MicromixerError):
    """Interface tracking hit the vertex cap; partial results are attached."""

    def __init__(self, message, times, lengths, line):
        super().__init__(message)
        self.times = times
        self.lengths = lengths
        self.line = line


class RunError(MicromixerError):
    """A single pipeline run failed; carries the grid point that failed."""

    def __init__(self, message, frequency=None, voltage=None):
        super().__init__(message)
        self.frequency = frequency
        self.voltage = voltage
