"""Exception types raised across the package."""


class WhithamError(Exception):
    """Base class for all package errors."""


class DomainError(WhithamError, ValueError):
    """Input outside the domain of a function (non-finite, nonpositive, ...)."""


class PreconditionError(WhithamError, ValueError):
    """A documented precondition of an operation does not hold."""


class ResolutionError(PreconditionError):
    """Grid too coarse for the requested synthesis."""


class TruncationError(PreconditionError):
    """Profile has not decayed at the edge of the periodic box."""


class NoRealShiftError(WhithamError, ValueError):
    """The Galilean normalization quadratic has no real root."""


class NonConvergenceError(WhithamError, RuntimeError):
    """Iteration cap reached or divergence detected."""

    def __init__(self, msg, residual=float("nan"), iterations=0, c=None):
        super().__init__(msg)
        self.residual = residual
        self.iterations = iterations
        self.c = c


class BlowUpError(WhithamError, RuntimeError):
    """Time integration produced non-finite values."""

    def __init__(self, msg, time=float("nan")):
        super().__init__(msg)
        self.time = time


class AmbiguityError(WhithamError, ValueError):
    """A snapshot has more than one dominant crest."""

    def __init__(self, msg, crests=()):
        super().__init__(msg)
        self.crests = list(crests)


class DegenerateInputError(WhithamError, ValueError):
    """Flat or otherwise featureless input."""


class DependencyError(WhithamError, RuntimeError):
    """A required auxiliary object (e.g. kernel table) is unavailable."""
