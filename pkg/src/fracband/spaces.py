"""Coefficient spaces and expansions.

A space is a weighted ultraspherical family (1+x)^gamma * C_n^(lambda) on
[-1, 1]. Both parameters are half-integers and are stored doubled as ints, so
space identity is exact (no float comparisons anywhere in the bookkeeping).
lambda = 1/2 is Legendre, lambda = 1 is Chebyshev U; lambda = 0 is reserved
for Chebyshev T, which only appears inside transforms.

Solutions live in the direct sum P (+) sqrt(1+x) U; operators push
coefficients through ladders of spaces with growing lambda and shrinking
gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidParameter, ShapeMismatch, WeightSingularity


def _as_two(value, name):
    """Validate a half-integer parameter and return it doubled as an int."""
    two = Fraction(value) * 2
    if two.denominator != 1:
        raise InvalidParameter(f"{name} must be a half-integer, got {value}")
    return int(two)


@dataclass(frozen=True, order=True)
class SpaceDesc:
    """One weighted ultraspherical family, identified exactly.

    Attributes
    ----------
    two_lambda : int
        Twice the ultraspherical parameter (>= 0).
    two_gamma : int
        Twice the weight exponent of (1+x)^gamma.
    """

    two_lambda: int
    two_gamma: int = 0

    def __post_init__(self):
        if self.two_lambda < 0:
            raise InvalidParameter("lambda must be >= 0")

    @property
    def lam(self) -> Fraction:
        return Fraction(self.two_lambda, 2)

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.two_gamma, 2)

    @property
    def unbounded_at_left(self) -> bool:
        """True when the (1+x)^gamma weight blows up at x = -1."""
        return self.two_gamma < 0

    def with_lambda(self, lam) -> "SpaceDesc":
        return SpaceDesc(_as_two(lam, "lambda"), self.two_gamma)

    def with_gamma(self, gamma) -> "SpaceDesc":
        return SpaceDesc(self.two_lambda, _as_two(gamma, "gamma"))

    def __str__(self):
        w = "" if self.two_gamma == 0 else f", weight (1+x)^{self.gamma}"
        return f"C^({self.lam}){w}"


def space(lam, gamma=0) -> SpaceDesc:
    return SpaceDesc(_as_two(lam, "lambda"), _as_two(gamma, "gamma"))


LEGENDRE = space(Fraction(1, 2))
CHEB_U = space(1)
CHEB_U_HALF = space(1, Fraction(1, 2))
CHEB_T = space(0)


def eval_ultra(lam, coeffs, x):
    """Evaluate sum_n c_n C_n^(lambda)(x) by backward (Clenshaw) recurrence.

    Works for any lambda > 0. x may be a scalar or an ndarray; the return
    type follows. Coefficients are treated as complex.
    """
    lam = float(lam)
    if lam <= 0:
        raise InvalidParameter("eval_ultra needs lambda > 0")
    c = np.asarray(coeffs, dtype=complex)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xv = np.asarray(x, dtype=float)
    if c.size == 0:
        out = np.zeros_like(xv, dtype=complex)
        return out[()] if scalar else out
    # C_{k+1} = alpha_k(x) C_k - beta_k C_{k-1} with
    # alpha_k = 2(k+lam)x/(k+1), beta_k = (k+2lam-1)/(k+1).
    u1 = np.zeros_like(xv, dtype=complex)
    u2 = np.zeros_like(xv, dtype=complex)
    for k in range(c.size - 1, -1, -1):
        alpha = (2.0 * (k + lam) / (k + 1.0)) * xv
        beta_next = (k + 2.0 * lam) / (k + 2.0)
        u0 = c[k] + alpha * u1 - beta_next * u2
        u2 = u1
        u1 = u0
    return u1[()] if scalar else u1


def _weight(gamma, x):
    g = float(gamma)
    if g == 0:
        return 1.0 if np.ndim(x) == 0 else np.ones_like(np.asarray(x, float))
    xv = np.asarray(x, dtype=float)
    if g < 0 and np.any(xv <= -1.0):
        raise WeightSingularity(
            f"expansion with weight (1+x)^{gamma} is unbounded at x = -1"
        )
    return (1.0 + xv) ** g


@dataclass(frozen=True)
class Fun:
    """A finite expansion in one space.

    Coefficients are stored as a read-only complex ndarray. Trailing entries
    below a relative tolerance can be dropped with trim(); nothing else ever
    mutates a Fun.
    """

    space: SpaceDesc
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return self.coeffs.size

    def trim(self, tol=1e-15) -> "Fun":
        return Fun(self.space, trim_coeffs(self.coeffs, tol))

    def __call__(self, x):
        return eval_fun(self, x)


def trim_coeffs(coeffs, tol):
    """Drop trailing coefficients below tol * max|c|, keeping at least one."""
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0:
        return c
    mags = np.abs(c)
    floor = tol * mags.max() if mags.max() > 0 else 0.0
    keep = np.nonzero(mags > floor)[0]
    n = keep[-1] + 1 if keep.size else 1
    return c[:n]


def eval_fun(f: Fun, x):
    """Evaluate a Fun, weight included.

    Raises WeightSingularity when gamma < 0 and x touches -1.
    """
    if f.space.two_lambda == 0:
        raise InvalidParameter("Chebyshev T expansions are transform-internal")
    base = eval_ultra(f.space.lam, f.coeffs, x)
    return _weight(f.space.gamma, x) * base


def _sanctioned_pair(a: SpaceDesc, b: SpaceDesc) -> bool:
    # First component: unweighted, lambda = h + 1/2. Second: gamma = 1/2 - h
    # with lambda in {h, h+1}. Covers the solution space and every operator
    # range level, integer and half-integer alike.
    if a.two_gamma != 0 or a.two_lambda % 2 == 0:
        return False
    h = (a.two_lambda - 1) // 2
    if b.two_gamma != 1 - 2 * h:
        return False
    return b.two_lambda in (2 * h, 2 * h + 2) and b.two_lambda >= 2


@dataclass(frozen=True)
class SumFun:
    """Direct sum of two expansions, e.g. the solution family P (+) U_{1/2}.

    Only the pairs of spaces that arise as solution or operator-range
    families are accepted; anything else is a bookkeeping bug upstream.
    """

    first: Fun
    second: Fun

    def __post_init__(self):
        if not _sanctioned_pair(self.first.space, self.second.space):
            raise ShapeMismatch(
                f"unsanctioned direct sum {self.first.space} (+) {self.second.space}"
            )

    def __call__(self, x):
        return eval_sumfun(self, x)

    def interleaved(self, n=None) -> np.ndarray:
        """Coefficients as (a_0, b_0, a_1, b_1, ...), zero-padded to n pairs."""
        if n is None:
            n = max(len(self.first), len(self.second))
        out = np.zeros(2 * n, dtype=complex)
        a = self.first.coeffs[:n]
        b = self.second.coeffs[:n]
        out[0 : 2 * len(a) : 2] = a
        out[1 : 2 * len(b) + 1 : 2] = b
        return out


def eval_sumfun(f: SumFun, x):
    return eval_fun(f.first, x) + eval_fun(f.second, x)


def sumfun_from_interleaved(vec, spaces) -> SumFun:
    """Inverse of SumFun.interleaved for a given (first, second) space pair."""
    v = np.asarray(vec, dtype=complex)
    if v.size % 2:
        raise ShapeMismatch("interleaved vector must have even length")
    return SumFun(Fun(spaces[0], v[0::2]), Fun(spaces[1], v[1::2]))
