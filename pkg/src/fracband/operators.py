"""Size-free operator templates and the classical banded factories.

An OpTemplate knows its coefficient spaces, its bandwidths, and how to build
the exact n x n leading section of the infinite operator for any n.
Composition builds the factors on a workspace enlarged by the right factor's
lower bandwidth and crops, which makes every section of a product equal to
the projection of the infinite product (intermediate indices in a product
path are bounded by the column index plus the sum of lower bandwidths).

Factories here cover the single-space ladder operators: conversion
(lambda -> lambda+1), weight absorption ((1+x) absorbed into gamma-1), the
Jacobi operator (multiplication by x), polynomial multiplication, integer
differentiation, and the dense triangular connection operators between
Legendre and Chebyshev U.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .banded import BandedMat, DenseMat, mat_add, mat_mul
from .errors import InvalidParameter, ShapeMismatch, SpaceMismatch
from .spaces import CHEB_U, LEGENDRE, SpaceDesc
from .transforms import jacobi_apply


@dataclass(frozen=True)
class OpTemplate:
    """A lazily sized linear operator between two coefficient spaces."""

    domain: SpaceDesc
    range: SpaceDesc
    l: int
    u: int
    build: Callable[[int], BandedMat | DenseMat] = field(repr=False)
    is_identity: bool = False
    dense: bool = False

    def section(self, n: int):
        """The exact n x n leading section."""
        if n < 0:
            raise ShapeMismatch("section size must be >= 0")
        return self.build(n)

    def __matmul__(self, other: "OpTemplate") -> "OpTemplate":
        return compose(self, other)

    def __add__(self, other: "OpTemplate") -> "OpTemplate":
        return add(self, other)

    def __mul__(self, alpha) -> "OpTemplate":
        return scale(self, alpha)

    __rmul__ = __mul__


def identity(space: SpaceDesc) -> OpTemplate:
    return OpTemplate(
        domain=space,
        range=space,
        l=0,
        u=0,
        build=BandedMat.identity,
        is_identity=True,
    )


def compose(a: OpTemplate, b: OpTemplate) -> OpTemplate:
    """a after b (matrix product a @ b)."""
    if a.domain != b.range:
        raise SpaceMismatch(f"cannot compose: {a.domain} != {b.range}")
    if b.is_identity:
        return a
    if a.is_identity:
        return b
    grow = b.l

    def build(n, a=a, b=b, grow=grow):
        m = n + grow
        return mat_mul(a.build(m), b.build(m)).crop(n, n)

    return OpTemplate(
        domain=b.domain,
        range=a.range,
        l=a.l + b.l,
        u=a.u + b.u,
        build=build,
        dense=a.dense or b.dense,
    )


def compose_chain(factors) -> OpTemplate:
    """Left-to-right fold: factors[0] @ factors[1] @ ... (first acts last)."""
    factors = list(factors)
    if not factors:
        raise InvalidParameter("empty composition")
    out = factors[0]
    for f in factors[1:]:
        out = compose(out, f)
    return out


def add(a: OpTemplate, b: OpTemplate) -> OpTemplate:
    if a.domain != b.domain or a.range != b.range:
        raise SpaceMismatch(
            f"cannot add operators {a.domain}->{a.range} and {b.domain}->{b.range}"
        )

    def build(n, a=a, b=b):
        return mat_add(a.build(n), b.build(n))

    return OpTemplate(
        domain=a.domain,
        range=a.range,
        l=max(a.l, b.l),
        u=max(a.u, b.u),
        build=build,
        dense=a.dense or b.dense,
    )


def scale(a: OpTemplate, alpha) -> OpTemplate:
    alpha = complex(alpha)
    if alpha == 1.0 and a.is_identity:
        return a

    def build(n, a=a, alpha=alpha):
        return a.build(n).scale(alpha)

    return OpTemplate(
        domain=a.domain, range=a.range, l=a.l, u=a.u, build=build, dense=a.dense
    )


def truncate(op: OpTemplate, n: int):
    """Finite section of a template; sections at different n agree."""
    return op.section(n)


# -- ladder operators ----------------------------------------------------------


def conversion(space: SpaceDesc) -> OpTemplate:
    """Rebase C^(lambda) coefficients in C^(lambda+1); gamma rides along.

    Diagonal lambda/(k+lambda) (first entry 1), second superdiagonal
    -lambda/(k+lambda+2).
    """
    lam = space.lam
    if lam <= 0:
        raise InvalidParameter("conversion needs lambda > 0")
    lamf = float(lam)

    def build(n, lamf=lamf):
        out = BandedMat.zeros(n, n, 0, 2)
        k = np.arange(n, dtype=float)
        out.set_diag(0, lamf / (k + lamf))
        if n > 2:
            out.set_diag(2, -lamf / (k[:-2] + lamf + 2.0))
        return out

    return OpTemplate(
        domain=space, range=space.with_lambda(lam + 1), l=0, u=2, build=build
    )


def weight_absorb(space: SpaceDesc) -> OpTemplate:
    """Multiplication by (1+x) absorbed into the weight: gamma -> gamma - 1.

    Column k carries (k+2lambda-1)/(2(k+lambda)) up, 1 on the diagonal and
    (k+1)/(2(k+lambda)) down. Same lambda on both sides.
    """
    lam = space.lam
    if lam <= 0:
        raise InvalidParameter("weight absorption needs lambda > 0")
    lamf = float(lam)

    def build(n, lamf=lamf):
        out = BandedMat.zeros(n, n, 1, 1)
        k = np.arange(n, dtype=float)
        out.set_diag(0, np.ones(n))
        if n > 1:
            out.set_diag(-1, (k[:-1] + 1.0) / (2.0 * (k[:-1] + lamf)))
            out.set_diag(1, (k[1:] + 2.0 * lamf - 1.0) / (2.0 * (k[1:] + lamf)))
        return out

    return OpTemplate(
        domain=space, range=space.with_gamma(space.gamma - 1), l=1, u=1, build=build
    )


def jacobi(space: SpaceDesc) -> OpTemplate:
    """Multiplication by x within one family."""
    lam = space.lam
    if lam <= 0:
        raise InvalidParameter("jacobi operator needs lambda > 0")
    lamf = float(lam)

    def build(n, lamf=lamf):
        out = BandedMat.zeros(n, n, 1, 1)
        k = np.arange(n, dtype=float)
        if n > 1:
            out.set_diag(-1, (k[:-1] + 1.0) / (2.0 * (k[:-1] + lamf)))
            out.set_diag(1, (k[1:] + 2.0 * lamf - 1.0) / (2.0 * (k[1:] + lamf)))
        return out

    return OpTemplate(domain=space, range=space, l=1, u=1, build=build)


def multiplication(space: SpaceDesc, coeffs) -> OpTemplate:
    """Multiplication by a smooth function within C^(lambda).

    coeffs expand the function in the space's own family C^(lambda). Built
    by the three-term recurrence

        M[C_{j+1}] = 2(j+lambda)/(j+1) J M[C_j]
                     - (j+2 lambda-1)/(j+1) M[C_{j-1}]

    on an (n+d)-sized workspace, then cropped, so every column of the
    section is exact. Bandwidth d = len(coeffs) - 1.
    """
    c = np.asarray(coeffs, dtype=complex)
    c = c if c.size else np.zeros(1, dtype=complex)
    d = c.size - 1
    lam = space.lam
    if lam <= 0:
        raise InvalidParameter("multiplication needs lambda > 0")
    if d == 0:
        return scale(identity(space), c[0])
    lamf = float(lam)

    def build(n, c=c, d=d, lamf=lamf):
        w = n + d
        J = jacobi(space).build(w)
        acc = BandedMat.identity(w).scale(c[0])
        prev = BandedMat.zeros(w, w, 0, 0)
        cur = BandedMat.identity(w)
        for j in range(c.size - 1):
            nxt = J.matmul(cur).scale(2.0 * (j + lamf) / (j + 1.0))
            if j > 0:
                nxt = nxt.add(prev.scale(-(j + 2.0 * lamf - 1.0) / (j + 1.0)))
            acc = acc.add(nxt.scale(c[j + 1]))
            prev, cur = cur, nxt
        return acc.crop(n, n)

    return OpTemplate(domain=space, range=space, l=d, u=d, build=build)


def diff_int(space: SpaceDesc, m: int) -> OpTemplate:
    """m-fold differentiation of an unweighted family: shift by m scaled by
    2^m lambda (lambda+1) ... (lambda+m-1)."""
    if m < 1 or int(m) != m:
        raise InvalidParameter("integer derivative order must be >= 1")
    lam = space.lam
    if lam <= 0:
        raise InvalidParameter("diff_int needs lambda > 0")
    if space.two_gamma != 0:
        raise InvalidParameter("diff_int applies to unweighted families")
    m = int(m)
    pre = Fraction(2) ** m
    for i in range(m):
        pre *= lam + i
    pref = float(pre)

    def build(n, m=m, pref=pref):
        out = BandedMat.zeros(n, n, 0, m)
        if n > m:
            out.set_diag(m, np.full(n - m, pref))
        return out

    return OpTemplate(
        domain=space, range=space.with_lambda(lam + m), l=0, u=m, build=build
    )


def conversion_chain(space: SpaceDesc, steps: int) -> OpTemplate:
    """Compose `steps` conversions starting from `space` (0 steps = identity)."""
    if steps < 0:
        raise InvalidParameter("steps must be >= 0")
    op = identity(space)
    cur = space
    for _ in range(steps):
        step = conversion(cur)
        op = compose(step, op)
        cur = step.range
    return op


# -- connection operators -------------------------------------------------------


def _connect_data(n: int, direction: str) -> np.ndarray:
    """Columns of P_j in U (direction 'PU') or U_j in P ('UP'); triangular."""
    out = np.zeros((n, n), dtype=complex)
    if n == 0:
        return out
    out[0, 0] = 1.0
    if n == 1:
        return out
    prev = np.zeros(n, dtype=complex)
    cur = np.zeros(n, dtype=complex)
    prev[0] = 1.0
    # P_1 = x = U_1 / 2 one way, U_1 = 2x = 2 P_1 the other.
    cur[1] = 0.5 if direction == "PU" else 2.0
    out[:, 1] = cur
    for j in range(1, n - 1):
        if direction == "PU":
            # Legendre recurrence through the U Jacobi operator
            nxt = (
                (2.0 * j + 1.0) * jacobi_apply(1.0, cur, out_len=n) - j * prev
            ) / (j + 1.0)
        else:
            # U recurrence through the Legendre Jacobi operator
            nxt = 2.0 * jacobi_apply(0.5, cur, out_len=n) - prev
        out[:, j + 1] = nxt
        prev, cur = cur, nxt
    return out


def connect_P_to_U(domain: SpaceDesc, range_: SpaceDesc) -> OpTemplate:
    """Legendre -> Chebyshev U rebasing (upper triangular, dense)."""
    if domain.two_lambda != LEGENDRE.two_lambda or range_.two_lambda != CHEB_U.two_lambda:
        raise InvalidParameter("connect_P_to_U rebases Legendre into U")

    def build(n):
        return DenseMat(_connect_data(n, "PU"), l=0)

    return OpTemplate(domain=domain, range=range_, l=0, u=0, build=build, dense=True)


def connect_U_to_P(domain: SpaceDesc, range_: SpaceDesc) -> OpTemplate:
    """Chebyshev U -> Legendre rebasing (upper triangular, dense)."""
    if domain.two_lambda != CHEB_U.two_lambda or range_.two_lambda != LEGENDRE.two_lambda:
        raise InvalidParameter("connect_U_to_P rebases U into Legendre")

    def build(n):
        return DenseMat(_connect_data(n, "UP"), l=0)

    return OpTemplate(domain=domain, range=range_, l=0, u=0, build=build, dense=True)
