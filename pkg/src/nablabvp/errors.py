"""Exception hierarchy shared by all modules."""


class NablaError(Exception):
    """Base class for errors raised by nablabvp."""


class DomainError(NablaError, ValueError):
    """Argument outside the region where a quantity is defined."""


class PoleError(DomainError):
    """A gamma ratio whose numerator sits on a pole."""


class SingularProblem(NablaError):
    """The solvability constant xi vanishes (numerically)."""


class SingularSystem(NablaError):
    """A dense system has a pivot below the singularity threshold."""


class HypothesisViolation(NablaError):
    """Sign assumptions on the boundary coefficients do not hold."""


class NoSignChange(NablaError):
    """A bisection bracket contains no sign change of the determinant."""
