"""Exception taxonomy for the package.

Everything raised on purpose derives from FracbandError so callers can catch
one base class at the service boundary.
"""


class FracbandError(Exception):
    """Base class for all errors raised by fracband."""


class InvalidParameter(FracbandError):
    """A numeric parameter is outside its admissible range."""


class InvalidOrder(FracbandError):
    """An integration/differentiation order is not a nonnegative half-integer."""


class InvalidLevel(FracbandError):
    """A conversion or multiplication level below the supported range."""


class SpaceMismatch(FracbandError):
    """Operator composition or addition with incompatible coefficient spaces."""


class ShapeMismatch(FracbandError):
    """Matrix/vector dimensions do not conform."""


class WeightSingularity(FracbandError):
    """Evaluation of a negatively weighted expansion at x = -1."""


class NoConvergence(FracbandError):
    """An adaptive process hit its resolution or size cap without converging."""


class DomainError(FracbandError):
    """Function argument outside the implemented domain."""


class SingularMatrix(FracbandError):
    """A pivot collapsed during factorization."""


class SingularSchurComplement(FracbandError):
    """The dense Schur block of a bordered system is singular."""


class UnsupportedWeightedCoefficient(FracbandError):
    """Weighted multiplication coefficients are only supported at level 0."""


class InsufficientConstraints(FracbandError):
    """A reformulation needs more side constraints than were supplied."""


class InvalidSpec(FracbandError):
    """A problem specification is structurally unusable."""


class ParseError(FracbandError):
    """Expression or problem-file syntax error.

    Carries the byte offset of the failure and the token classes that would
    have been accepted there.
    """

    def __init__(self, message, offset=None, expected=()):
        super().__init__(message)
        self.offset = offset
        self.expected = tuple(expected)
