"""Problem descriptions for the half-order solver.

A problem is a sum of terms acting on the unknown u, a right-hand side, and
optionally boundary constraints.  Every coefficient function comes in two
parts, smooth plus sqrt(1+x)-weighted, mirroring the structure of the
solution family itself.
"""

from __future__ import annotations

import enum
import numbers
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidOrder, InvalidParameter, InvalidSpec
from .spaces import SumFun, _as_two
from .transforms import chebT_coeffs_adaptive


class TermKind(enum.Enum):
    IDENTITY = "identity"
    INTEGRAL = "integral"
    DERIVATIVE_RL = "derivative_rl"
    DERIVATIVE_CAPUTO = "derivative_caputo"


_DERIVATIVE_KINDS = (TermKind.DERIVATIVE_RL, TermKind.DERIVATIVE_CAPUTO)


def _resolve_part(part, tol):
    """Turn one coefficient part into Chebyshev T coefficients.

    Accepts None (absent), a scalar, a sequence already holding T
    coefficients, or a callable to be resolved adaptively.
    """
    if part is None:
        return None
    if isinstance(part, numbers.Number):
        return np.array([complex(part)])
    if callable(part):
        return chebT_coeffs_adaptive(part, tol)
    arr = np.asarray(part, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidParameter("coefficient sequences must be non-empty 1-D")
    return arr


@dataclass(frozen=True)
class CoeffFn:
    """A function r(x) + sqrt(1+x) s(x), either part optional.

    Each part may be a scalar, a callable of x, or a sequence of Chebyshev T
    coefficients.  In operator-range families carrying a different weight the
    second part is read as the smooth factor multiplying that weight instead.
    """

    smooth: object = None
    weighted: object = None

    def chebT_parts(self, tol):
        return _resolve_part(self.smooth, tol), _resolve_part(self.weighted, tol)

    def is_unit(self) -> bool:
        if self.weighted is not None:
            return False
        return isinstance(self.smooth, numbers.Number) and complex(self.smooth) == 1

    def is_zero(self) -> bool:
        def flat(part):
            if part is None:
                return True
            if isinstance(part, numbers.Number):
                return complex(part) == 0
            return False

        return flat(self.smooth) and flat(self.weighted)


#: right-hand side of a homogeneous equation
ZERO_RHS = CoeffFn()


@dataclass(frozen=True)
class Term:
    """One summand alpha(x) . Op^(order) [ beta(x) u ](x).

    left is alpha (constant 1 when None), right is beta (identity when
    None).  Orders are half-integers stored doubled, as everywhere else.
    """

    kind: TermKind
    two_order: int = 0
    left: CoeffFn | None = None
    right: CoeffFn | None = None

    def __post_init__(self):
        if not isinstance(self.two_order, int) or self.two_order < 0:
            raise InvalidOrder(f"bad doubled order {self.two_order!r}")
        if self.kind is TermKind.IDENTITY and self.two_order != 0:
            raise InvalidSpec("identity terms have order 0")
        if self.kind is not TermKind.IDENTITY and self.two_order == 0:
            raise InvalidSpec(
                f"a {self.kind.value} term of order 0 is an identity term"
            )
        if self.kind is TermKind.DERIVATIVE_CAPUTO and self.right is not None:
            if not self.right.is_unit():
                raise InvalidSpec(
                    "Caputo derivative terms take no inner coefficient"
                )

    @property
    def order(self):
        from fractions import Fraction

        return Fraction(self.two_order, 2)


def term(kind, order=0, left=None, right=None) -> Term:
    """Convenience constructor taking the order as an actual half-integer."""
    if isinstance(kind, str):
        kind = TermKind(kind)
    if left is not None and not isinstance(left, CoeffFn):
        left = CoeffFn(smooth=left)
    if right is not None and not isinstance(right, CoeffFn):
        right = CoeffFn(smooth=right)
    return Term(kind=kind, two_order=_as_two(order, "order"), left=left, right=right)


@dataclass(frozen=True)
class Constraint:
    """A point-evaluation condition u(point) = value."""

    point: float
    value: complex = 0.0

    def __post_init__(self):
        if not -1.0 <= self.point <= 1.0:
            raise InvalidParameter(f"constraint point {self.point} outside [-1, 1]")


@dataclass(frozen=True)
class ProblemSpec:
    """A full problem: terms, right-hand side, constraints, accuracy budget.

    n = None asks the solver to grow the truncation automatically until the
    error estimate clears the tolerance.
    """

    terms: tuple[Term, ...]
    rhs: CoeffFn = ZERO_RHS
    constraints: tuple[Constraint, ...] = ()
    tolerance: float = 1e-14
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not self.terms:
            raise InvalidSpec("a problem needs at least one term")
        kinds = {t.kind for t in self.terms}
        if TermKind.DERIVATIVE_RL in kinds and TermKind.DERIVATIVE_CAPUTO in kinds:
            raise InvalidSpec("cannot mix the two derivative conventions")
        if self.kind == "fie" and self.constraints:
            raise InvalidSpec("integral equations take no boundary constraints")
        if not (self.tolerance > 0):
            raise InvalidSpec("tolerance must be positive")
        if self.n is not None and (not isinstance(self.n, int) or self.n < 1):
            raise InvalidSpec(f"bad truncation size {self.n!r}")

    @property
    def kind(self) -> str:
        kinds = {t.kind for t in self.terms}
        if TermKind.DERIVATIVE_CAPUTO in kinds:
            return "fde_caputo"
        if TermKind.DERIVATIVE_RL in kinds:
            return "fde_rl"
        return "fie"

    @property
    def two_order_max(self) -> int:
        return max(
            (t.two_order for t in self.terms if t.kind in _DERIVATIVE_KINDS),
            default=0,
        )


@dataclass(frozen=True)
class Solution:
    """What the solver hands back.

    u evaluates anywhere on [-1, 1]; aux holds the recovered polynomial
    coefficients when the problem was posed in the Caputo sense.
    """

    u: SumFun
    n_used: int
    aux: tuple = ()
    error_estimate: float | None = None
    cond_estimate: float | None = None

    def __call__(self, x):
        return self.u(x)
