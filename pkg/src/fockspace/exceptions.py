"""Exception types shared across the package."""


class FockError(Exception):
    """Base class for all errors raised by :mod:`fockspace`."""


class DomainError(FockError, ValueError):
    """An argument lies outside the domain of a function."""


class NonConvergence(FockError, ArithmeticError):
    """A series or iteration hit its term budget without converging."""


class DimensionMismatch(FockError, ValueError):
    pass


class SectorViolation(FockError, ValueError):
    """A point that must lie in a sector ``S^delta_N`` does not."""


class PreconditionViolation(FockError, ValueError):
    pass


class ToleranceNotMet(FockError, ArithmeticError):
    """Raised only when a caller asks for strict tolerance enforcement.

    By default quadrature returns its best estimate and sets a flag instead.
    """
