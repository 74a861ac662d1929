"""Exception hierarchy shared by every module of the package."""


class PtHillError(Exception):
    """Base class for all errors raised by :mod:`pthill`."""


class ValidationError(PtHillError, ValueError):
    """Malformed user input (configuration, grids, coefficient blocks)."""


class RepresentationMissingError(PtHillError):
    """Neither a coefficient table nor a closed form can supply the request."""


class DomainError(PtHillError, ValueError):
    """An operation was applied outside its mathematical domain."""


class RangeError(PtHillError, IndexError):
    """A coefficient index lies beyond what the stored table supports."""


class MagnitudeError(PtHillError, ArithmeticError):
    """The spectral parameter exceeds the configured energy cap."""


class IntegrationError(PtHillError, ArithmeticError):
    """The monodromy integration lost accuracy (Wronskian drift)."""


class ContourAccuracyError(PtHillError, ArithmeticError):
    """The winding number on a contour did not stabilise."""


class NumberingError(PtHillError, ArithmeticError):
    """Band indices could not be assigned consistently."""


class PreconditionError(PtHillError, ValueError):
    """A localisation or analytic precondition does not hold."""


class ResonanceError(PtHillError, ArithmeticError):
    """A series denominator fell below the resonance threshold."""


class OracleUnavailableError(PtHillError):
    """The matrix oracle cannot handle the requested potential."""


class TheoryViolationError(PtHillError, ArithmeticError):
    """A computed structure contradicts a proven qualitative property."""


class InconsistencyError(PtHillError, ArithmeticError):
    """Two independent computations of the same object disagree."""


class DiagnosticUndefinedError(PtHillError, ValueError):
    """A diagnostic was requested at a point where it is not defined."""


class PartialResultError(PtHillError):
    """A numerical failure interrupted a pipeline; ``partial`` holds what finished."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
