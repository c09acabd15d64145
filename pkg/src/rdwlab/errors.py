"""Exception types raised by rdwlab."""


class RdwError(Exception):
    """Base class for all rdwlab errors."""


class DegenerateGeometryError(RdwError, ValueError):
    pass


class InvalidGainError(RdwError, ValueError):
    pass


class ConfigError(RdwError, ValueError):
    pass


class ParameterError(RdwError, ValueError):
    pass


class FitDegenerateError(RdwError):
    """Response data cannot identify the psychometric curve (e.g. perfectly separated)."""


class ThresholdUndefinedError(RdwError, ValueError):
    pass


class CIUnreliableError(RdwError):
    """Too many bootstrap refits failed to give a usable interval."""


class EmptyStatisticsError(RdwError, ValueError):
    pass


class UndefinedTestError(RdwError, ValueError):
    pass
