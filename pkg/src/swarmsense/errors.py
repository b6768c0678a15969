"""Exception hierarchy shared by all swarmsense modules."""


class SwarmSenseError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SwarmSenseError, ValueError):
    """Invalid parameters, missing files or malformed configuration."""


class InvalidRequirementsError(ConfigError):
    pass


class CalibrationError(SwarmSenseError, ValueError):
    pass


class PlanGenerationError(SwarmSenseError, RuntimeError):
    pass


class ScalingError(SwarmSenseError, ValueError):
    """Raised when a zero vector is unit-scaled."""


class TopologyError(SwarmSenseError, ValueError):
    pass


class InstanceTooLargeError(SwarmSenseError, ValueError):
    pass


class InvalidRunError(SwarmSenseError, ValueError):
    """A run whose results cannot be scored, e.g. nothing was sensed."""
