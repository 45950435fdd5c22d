"""Exception and warning types shared across the package."""


class EllhillError(Exception):
    """Base class for all library errors."""


class EllipticDomainError(EllhillError, ValueError):
    """Modulus parameter on the cut line m in [1, inf)."""


class ConvergenceError(EllhillError, RuntimeError):
    """An iteration (AGM, Newton, ODE step control) failed to converge."""


class PoleError(EllhillError, ValueError):
    """Evaluation requested too close to a pole or singular point."""


class PoleTooCloseError(PoleError):
    """A contour or expansion disk would cross a singularity."""


class DegenerateError(EllhillError, ValueError):
    """Parameter configuration collapses roots or series denominators."""


class DegenerateWarning(UserWarning):
    """Roots merged (or nearly merged); results returned but suspect."""


class LeadingZeroError(EllhillError, ValueError):
    """Leading polynomial coefficient vanishes; degree would drop."""


class ZeroCoefficientError(EllhillError, ValueError):
    """A coefficient required to be nonzero is (numerically) zero."""


class RegimeViolationError(EllhillError, ValueError):
    """Arguments sit outside the asymptotic regime of a series formula."""


class CollisionError(EllhillError, RuntimeError):
    """Two tracked roots collided during a parameter sweep.

    The control-parameter value at the collision is stored in ``varsigma``.
    """

    def __init__(self, message, varsigma=None):
        super().__init__(message)
        self.varsigma = varsigma


class BranchAmbiguityError(EllhillError, RuntimeError):
    """A square-root branch could not be continued through a zero."""


class SingularityError(EllhillError, ValueError):
    """Evaluation at a logarithmic branch point of a canonical coordinate."""


class PathPoleConflictError(EllhillError, ValueError):
    """No integration path with the required pole clearance exists."""


class NonUnimodularError(EllhillError, RuntimeError):
    """Transfer matrix determinant drifted from 1; integration failed."""
