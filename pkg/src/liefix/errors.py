"""Exception types shared across the package."""


class LiefixError(Exception):
    """Base class for all package-specific errors."""


class ParseError(LiefixError):
    """Malformed scalar/matrix/algebra text or JSON."""


class ConductorError(LiefixError):
    """Conductor out of range, or a root of unity used where none exists."""


class DivisionByZero(LiefixError, ZeroDivisionError):
    pass


class SingularMatrix(LiefixError):
    pass


class ShapeError(LiefixError):
    pass


class NotNilpotentMatrix(LiefixError):
    pass


class NotSimilar(LiefixError):
    """No invertible intertwiner can exist (invariant factors differ)."""


class SamplingExhausted(LiefixError):
    """Seeded sampling budget ran out before a valid candidate appeared."""


class ExceedsBound(LiefixError):
    """An exact search passed its configured bound without an answer."""


class JacobiViolation(LiefixError):
    """Structure constants fail the Jacobi identity."""


class NotSolvable(LiefixError):
    pass


class SplitFailure(LiefixError):
    """A characteristic polynomial does not split over the working conductor.

    ``suggested_conductor`` carries a lift that would (or might) make the
    offending root expressible, so callers can retry instead of giving up.
    """

    def __init__(self, message, suggested_conductor=None):
        super().__init__(message)
        self.suggested_conductor = suggested_conductor


class NotAlmostAbelian(LiefixError):
    """No abelian codimension-one ideal exists."""


class SearchIncomplete(LiefixError):
    """The hyperplane search ended without a definitive answer."""


class NotFiliform(LiefixError):
    pass


class AdaptationFailed(LiefixError):
    """Could not build an adapted basis within the sampling budget."""


class PreconditionViolated(LiefixError):
    pass


class NoNonsingularDerivation(LiefixError):
    """Every derivation of the algebra is singular (characteristically nilpotent)."""


class NotDiagonalizableHere(LiefixError):
    """The derivation has no eigenbasis over the working field."""


class UnknownName(LiefixError):
    """Catalog name not recognized."""


class BadParameters(LiefixError):
    """Catalog parameters outside the legal range."""
