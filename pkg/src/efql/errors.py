"""Exception hierarchy shared across the package."""


class EfqlError(Exception):
    """Base class for all package errors."""


class InvalidPartition(EfqlError):
    """Partition construction arguments are unusable (count < 2, lo >= hi, ...)."""


class NonFiniteInput(EfqlError):
    """A membership query received NaN or +/-Inf."""


class DimensionMismatch(EfqlError):
    """State vector length does not match the partition dimensionality."""


class DegenerateMembership(EfqlError):
    """Membership mass underflowed to zero; the partition or clamping is misconfigured."""


class InvalidTemperature(EfqlError):
    """SoftMax temperature must be strictly positive."""


class ShapeMismatch(EfqlError):
    """Matrix/vector operands have inconsistent shapes."""


class ParameterOutOfRange(EfqlError):
    """A learning parameter left its documented range."""


class NonFiniteUpdate(EfqlError):
    """A table update produced NaN or +/-Inf; the run has diverged."""


class NonFiniteState(EfqlError):
    """Environment integration produced NaN or +/-Inf."""


class ContiguityViolation(EfqlError):
    """A recorded transition does not continue the open segment."""


class InsufficientData(EfqlError):
    """The replay buffer holds fewer sealed segments than requested."""


class NoConvergence(EfqlError):
    """Fixed-point iteration exhausted its budget (gamma >= 1 or tol too tight)."""


class EmptySeries(EfqlError):
    """Metric computation received an empty returns vector."""


class ConfigError(EfqlError):
    """Base class for configuration problems (CLI exit code 1)."""


class ConfigParseError(ConfigError):
    """Config file failed to parse or a value violates its documented range."""


class UnknownKey(ConfigError):
    """Config contains a key or enum value outside the documented schema."""
