"""Exception hierarchy shared by all modules."""


class ThermofluxError(Exception):
    """Base class for input errors."""


class NegativePopulation(ThermofluxError):
    pass


class NotNormalized(ThermofluxError):
    pass


class EmptyVector(ThermofluxError):
    pass


class InvalidRank(ThermofluxError):
    pass


class DimensionMismatch(ThermofluxError):
    pass


class BetaMismatch(ThermofluxError):
    pass


class InvalidSystem(ThermofluxError):
    pass


class NotHermitian(ThermofluxError):
    pass


class InvalidDensityMatrix(ThermofluxError):
    pass


class OutOfRange(ThermofluxError):
    pass


class NumericalFailure(Exception):
    """Raised when an iterative routine fails to converge."""
