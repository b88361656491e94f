"""Exception hierarchy.

DomainError covers violated preconditions (CLI exit code 2); the more
specific subclasses name the failure mode a caller may want to catch.
"""


class ArcBernsteinError(Exception):
    """Base class for all package errors."""


class DomainError(ArcBernsteinError):
    """Input violates a documented precondition."""


class IllConditionedInputError(ArcBernsteinError):
    """A self-check residual exceeded its tolerance for the given input."""


class NotRationalError(ArcBernsteinError):
    """Antiderivative requested for a function with a nonzero residue."""

    def __init__(self, location, residue):
        self.location = location
        self.residue = residue
        super().__init__(
            f"nonzero residue {residue!r} at pole {location!r}: "
            "antiderivative is not rational"
        )


class PoleOnCurveError(ArcBernsteinError):
    """Sup-norm evaluation hit a non-finite value on the curve."""


class TraceFailureError(ArcBernsteinError):
    """Newton continuation of a boundary trace diverged."""

    def __init__(self, t, msg=""):
        self.t = t
        super().__init__(f"boundary trace failed at parameter t={t}: {msg}")


class NotSimpleError(ArcBernsteinError):
    """Traced branches collided away from the endpoints."""


class ResolutionError(ArcBernsteinError):
    """A quadrature or winding count did not settle at the current resolution."""


class UnsupportedGeometryError(ArcBernsteinError):
    """Boundary curve is outside the supported (star-like) class."""


class FitFailureError(ArcBernsteinError):
    """Boundary-correspondence iteration failed to converge."""

    def __init__(self, residual, msg=""):
        self.residual = residual
        super().__init__(f"conformal fit did not converge (residual {residual:.3e}) {msg}")


class NewtonError(ArcBernsteinError):
    """A Newton solve failed to reach its target residual."""


class PoleBudgetError(ArcBernsteinError):
    """Assembled rational function exceeded its allowed pole orders."""


class VerificationFailure(ArcBernsteinError):
    """An estimate that must hold was violated (CLI exit code 4)."""
