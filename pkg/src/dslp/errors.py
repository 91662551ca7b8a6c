"""Exception hierarchy shared by every module of the package."""


class DSLPError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DSLPError, ValueError):
    """Input data is structurally invalid.

    ``field`` names the offending input (for example ``"w[2]"``) so that the
    command line layer can report it verbatim.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ZeroCoefficient(ValidationError):
    """Some f_n equals zero."""


class NonPositiveWeight(ValidationError):
    """Some w_n is not strictly positive."""


class LengthMismatch(ValidationError):
    """A coefficient sequence does not have the length implied by N."""


class NTooSmall(ValidationError):
    """The number of interior points N is below 2."""


class NotSelfAdjoint(ValidationError):
    """A boundary condition violates the rank or self-adjointness test."""


class UnclassifiableBC(ValidationError):
    """A self-adjoint boundary condition fits neither canonical family."""


class RangeError(ValidationError):
    """A canonical parameter lies outside its admissible range."""


class NotUnimodular(ValidationError):
    """A coupling matrix does not have determinant one."""


class ChartMembershipFailed(ValidationError):
    """A boundary condition lies in none of the requested coordinate charts."""


class NumericalError(DSLPError, ArithmeticError):
    """A numerical routine produced an inconsistent result."""


class NonRealRootsDetected(NumericalError):
    """The real roots found account for less than the polynomial degree."""


class DegenerateSturmChain(NumericalError):
    """Sturm counts stayed inconsistent even after perturbing the chain."""


class DegreeMismatch(NumericalError):
    """The characteristic polynomial degree disagrees with the count formula."""


class IllConditionedSpectrum(NumericalError):
    """Roots of the expanded polynomial disagree with the recurrence evaluated
    pointwise, so the eigenvalues cannot be certified in double precision."""


class BracketTooSmall(NumericalError):
    """A pointwise scan found fewer roots than the expected count."""


class UnknownTheorem(DSLPError, KeyError):
    """A theorem identifier is not in the registry."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown theorem"


class SpecShapeMismatch(DSLPError, ValueError):
    """An instance does not carry the parameters a theorem check expects."""
