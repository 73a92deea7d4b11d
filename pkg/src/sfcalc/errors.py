"""Exception hierarchy shared by every module."""


class SFCalcError(Exception):
    """Base class for all errors raised by sfcalc."""


class DimensionError(SFCalcError, ValueError):
    """Operands live in algebras or spaces of different dimension."""


class SingularScalarError(SFCalcError, ZeroDivisionError):
    """A scalar that has to be inverted is zero (or not a paravector)."""


class InvalidUnitError(SFCalcError, ValueError):
    """A supposed imaginary unit is not a unit 1-vector."""


class SpectrumError(SFCalcError):
    """The scalar lies (numerically) on the S-spectrum.

    ``sphere`` holds the offending ``(u, v)`` pair.
    """

    def __init__(self, message, sphere=None):
        super().__init__(message)
        self.sphere = sphere


class NumericalFailure(SFCalcError, RuntimeError):
    """An eigenvalue or factorization routine did not converge."""


class PreconditionError(SFCalcError, ValueError):
    """Input violates a documented precondition (e.g. non-commuting tuple)."""


class DomainError(SFCalcError, ValueError):
    """Evaluation point outside the domain of a slice function."""


class GeometryError(SFCalcError, ValueError):
    """Contour geometry is unusable for the requested integral."""


class NonSeparableError(GeometryError):
    """Selected spectral spheres cannot be separated from the others."""


class UnsafeContourError(GeometryError):
    """A contour passes too close to the spectrum.

    ``margins`` lists the offending distances.
    """

    def __init__(self, message, margins=()):
        super().__init__(message)
        self.margins = list(margins)


class DivergenceError(SFCalcError, ValueError):
    """An integral or series is outside its region of convergence."""
