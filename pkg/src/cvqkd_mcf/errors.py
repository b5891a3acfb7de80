"""Exception hierarchy shared by all modules."""


class ParameterError(ValueError):
    """An input lies outside its physical or mathematical domain."""


class NumericalDomainError(ArithmeticError):
    """A computation left its valid domain, e.g. a non-physical covariance state."""


class InfeasibleLinkError(Exception):
    """No positive secret key can be produced for the requested link."""


class FitError(ValueError):
    pass


class CalibrationError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class OutOfRangeError(ValueError):
    """Query outside the tabulated range; tables are never extrapolated."""
