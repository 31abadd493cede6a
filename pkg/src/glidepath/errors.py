"""Exception hierarchy for the glidepath package."""


class GlidepathError(Exception):
    """Base class for all package errors."""


class ParameterError(GlidepathError):
    """A model or algorithm parameter violates its constraints."""


class NotApplicableError(GlidepathError):
    """An operation was called on a model variant it does not apply to."""


class SimulationError(GlidepathError):
    """Path simulation produced non-finite values."""


class GridError(GlidepathError):
    """Wealth grid construction failed (degenerate bounds, empty nodes)."""


class RegressionError(GlidepathError):
    """Least-squares stage failed (empty or all-zero design)."""


class UtilityDomainError(GlidepathError):
    """Utility or inverse utility evaluated outside its domain."""


class ConfigError(GlidepathError):
    """Configuration document is malformed or violates a constraint."""
