"""Exception hierarchy.

Two families matter to callers: configuration problems (bad parameters,
invalid partitions, degenerate set-ups) and numeric problems (domain errors,
overflow, series that refuse to converge).  The command line maps them to
distinct exit codes.
"""


class RisNomaError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(RisNomaError, ValueError):
    """A parameter or configuration value violates an invariant."""


class InvalidPartitionError(ConfigError):
    pass


class DegenerateConfigurationError(ConfigError):
    """The configuration is valid but the fitted gain law is unusable."""


class NumericError(RisNomaError, ArithmeticError):
    """A numerical routine could not produce a trustworthy value."""


class DomainError(NumericError, ValueError):
    pass


class GammaOverflowError(NumericError, OverflowError):
    pass


class NonConvergenceError(NumericError):
    pass


class SingularParameterError(NumericError):
    pass


class ParameterError(NumericError, ValueError):
    """Series parameters that make the series undefined."""
