"""Exception hierarchy shared by all modules.

The CLI maps each family onto an exit code: validation errors to 2,
numeric failures to 3 and solver failures to 4.
"""


class DirgapsError(Exception):
    """Base class for every library-raised error."""


class ValidationError(DirgapsError, ValueError):
    """Arguments outside the documented domain."""


class PoleError(ValidationError):
    """Evaluation requested at a pole."""


class NumericError(DirgapsError, ArithmeticError):
    """A numeric guarantee could not be met."""


class PrecisionError(NumericError):
    """Error bound cannot reach the requested tolerance."""


class RealityError(PrecisionError):
    """A quantity that must be real has a large imaginary part."""


class CancellationError(NumericError):
    """Negative Laurent coefficients failed to cancel."""


class BranchError(NumericError):
    """A square-root branch could not be decided."""


class SolverError(DirgapsError, RuntimeError):
    """Root bracketing or refinement failed."""


class EmptyReportError(ValidationError):
    """Not enough data to form a report."""
