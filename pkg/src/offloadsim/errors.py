"""Exception types shared across the simulator."""


class OffloadSimError(Exception):
    """Base class for simulator-specific errors."""


class ConfigError(OffloadSimError):
    """Experiment configuration is invalid or inconsistent."""


class UnservableLinkError(OffloadSimError):
    """Link capacity is zero or negative, so content cannot be delivered."""


class OracleProtocolError(OffloadSimError):
    """The decision oracle replied with something other than the two decisions."""


class OracleTransportError(OffloadSimError):
    """The remote decision oracle could not be reached after retrying."""
