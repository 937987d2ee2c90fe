"""Exception hierarchy shared by every module."""


class RegdualError(Exception):
    """Base class for all package errors."""


class InvalidInputError(RegdualError, ValueError):
    """A point or array is malformed (non-finite, wrong rank)."""


class ShapeError(RegdualError, ValueError):
    """Operands live in different spaces or have mismatched lengths."""


class DomainError(RegdualError, ValueError):
    """An argument lies outside the domain of a formula."""


class InvalidParameterError(RegdualError, ValueError):
    """An operator or schedule parameter violates its constraints."""


class ConfigurationError(RegdualError, ValueError):
    """A scheme was requested in a space where it is not defined."""


class ScheduleError(RegdualError, ValueError):
    """A step-size schedule is malformed or fails its convergence conditions.

    ``failures`` lists the names of the violated conditions.
    """

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class ScheduleRangeError(RegdualError, IndexError):
    """An explicit schedule was indexed past its end."""


class DivergenceError(RegdualError, ArithmeticError):
    """An iterate became non-finite. ``trace`` holds everything recorded up to
    and including the last finite iterate."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ResolventError(RegdualError, ArithmeticError):
    """The inner Newton solve did not reach its tolerance.

    ``best`` is the lowest-residual iterate seen and ``index`` the position
    along a regularization path, when applicable.
    """

    def __init__(self, message, best=None, residual=None, index=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.index = index
