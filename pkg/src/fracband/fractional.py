"""Half-order calculus operators and the 2x2 block layer.

Fractional integrals and derivatives of half-integer order map the direct-sum
family (Legendre) + sqrt(1+x)(Chebyshev U) into itself or into one of a ladder
of two-space levels:

    level m     : C^(m+1/2)  (+)  (1+x)^(1/2-m)  C^(m+1)
    level m+1/2 : C^(m+3/2)  (+)  (1+x)^(-1/2-m) C^(m+1)

Every operator here is a BlockOp: a 2x2 arrangement of OpTemplates acting on
(first, second) coefficient pairs. Interleaving the pair turns block-banded
into banded, which is what the solvers consume.

The atomic facts, each a two-entry column:

    Q^(1/2) P_k              = (2/sqrt(pi))/(2k+1) w (U_k - U_{k-1})
    Q^(1/2) [w U_k]          = (sqrt(pi)/2) (P_k + P_{k+1})
    D^(1/2) P_k              = (1/sqrt(pi)) w^{-1} (U_k + U_{k-1})
    D^(1/2) [w U_k]          = (sqrt(pi)/2) (C^(3/2)_k + C^(3/2)_{k-1})

with w = (1+x)^(1/2). Everything of higher order composes from these plus
classical differentiation, conversion and weight absorption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .banded import BandedMat, interleave
from .errors import (
    InvalidLevel,
    InvalidOrder,
    InvalidParameter,
    ShapeMismatch,
    UnsupportedWeightedCoefficient,
    WeightSingularity,
)
from .operators import (
    OpTemplate,
    add,
    compose,
    connect_P_to_U,
    connect_U_to_P,
    conversion,
    diff_int,
    identity,
    multiplication,
    scale,
    weight_absorb,
)
from .spaces import CHEB_U_HALF, LEGENDRE, SpaceDesc, _sanctioned_pair, space
from .special import gamma_half_ratio
from .transforms import jacobi_apply

SQRT_PI = math.sqrt(math.pi)


def _as_two_order(mu) -> int:
    two = Fraction(mu) * 2
    if two.denominator != 1:
        raise InvalidOrder(f"order must be a half-integer, got {mu}")
    return int(two)


def level_spaces(two_level: int) -> tuple[SpaceDesc, SpaceDesc]:
    """The (first, second) coefficient spaces of a ladder level.

    two_level is twice the level: 0 is the solution family itself.
    """
    if two_level < 0:
        raise InvalidLevel("levels start at 0")
    if two_level % 2 == 0:
        m = two_level // 2
        return (
            SpaceDesc(2 * m + 1, 0),
            SpaceDesc(2 * m + 2, 1 - 2 * m),
        )
    m = (two_level - 1) // 2
    return (
        SpaceDesc(2 * m + 3, 0),
        SpaceDesc(2 * m + 2, -1 - 2 * m),
    )


# -- atomic half-order operators ----------------------------------------------


def half_integral_P() -> OpTemplate:
    """Half integral of Legendre coefficients, landing in the weighted U part."""

    def build(n):
        out = BandedMat.zeros(n, n, 0, 1)
        k = np.arange(n, dtype=float)
        c = (2.0 / SQRT_PI) / (2.0 * k + 1.0)
        out.set_diag(0, c)
        if n > 1:
            out.set_diag(1, -c[1:])
        return out

    return OpTemplate(domain=LEGENDRE, range=CHEB_U_HALF, l=0, u=1, build=build)


def half_integral_U() -> OpTemplate:
    """Half integral of the weighted U part, landing in Legendre."""

    def build(n):
        out = BandedMat.zeros(n, n, 1, 0)
        half_rtpi = SQRT_PI / 2.0
        out.set_diag(0, np.full(n, half_rtpi))
        if n > 1:
            out.set_diag(-1, np.full(n - 1, half_rtpi))
        return out

    return OpTemplate(domain=CHEB_U_HALF, range=LEGENDRE, l=1, u=0, build=build)


def half_derivative_P() -> OpTemplate:
    """Half derivative of Legendre coefficients, into (1+x)^(-1/2) U."""

    def build(n):
        out = BandedMat.zeros(n, n, 0, 1)
        v = np.full(n, 1.0 / SQRT_PI)
        out.set_diag(0, v)
        if n > 1:
            out.set_diag(1, v[1:])
        return out

    return OpTemplate(
        domain=LEGENDRE, range=space(1, Fraction(-1, 2)), l=0, u=1, build=build
    )


def half_derivative_U() -> OpTemplate:
    """Half derivative of the weighted U part, into C^(3/2)."""

    def build(n):
        out = BandedMat.zeros(n, n, 0, 1)
        v = np.full(n, SQRT_PI / 2.0)
        out.set_diag(0, v)
        if n > 1:
            out.set_diag(1, v[1:])
        return out

    return OpTemplate(domain=CHEB_U_HALF, range=space(Fraction(3, 2)), l=0, u=1, build=build)


def weighted_derivative(space_in: SpaceDesc) -> OpTemplate:
    """d/dx on (1+x)^mu C^(lambda), expanded in (1+x)^(mu-1) C^(lambda+1).

    Column k keeps three entries: rows k, k-1, k-2 with values
    lam(1 + (mu-lam)/(k+lam)), 2 lam, lam(1 - (mu-lam)/(k+lam)). The
    unweighted case mu = 0 belongs to diff_int, which stays in gamma = 0;
    routing it here would manufacture a spurious (1+x)^(-1) weight.
    """
    lam, mu = space_in.lam, space_in.gamma
    if mu == 0:
        raise InvalidParameter("mu = 0 differentiation is unweighted; use diff_int")
    if lam <= 0:
        raise InvalidParameter("weighted derivative needs lambda > 0")
    lamf, muf = float(lam), float(mu)

    def build(n, lamf=lamf, muf=muf):
        out = BandedMat.zeros(n, n, 0, 2)
        k = np.arange(n, dtype=float)
        ratio = (muf - lamf) / (k + lamf)
        out.set_diag(0, lamf * (1.0 + ratio))
        if n > 1:
            out.set_diag(1, np.full(n - 1, 2.0 * lamf))
        if n > 2:
            out.set_diag(2, lamf * (1.0 - ratio[2:]))
        return out

    return OpTemplate(
        domain=space_in,
        range=SpaceDesc(space_in.two_lambda + 2, space_in.two_gamma - 2),
        l=0,
        u=2,
        build=build,
    )


# -- whole- and half-order derivatives on each part ----------------------------


def derivative_P_part(two_mu: int) -> OpTemplate:
    """D^mu on the Legendre part. Integer mu shifts; half-integer mu chains
    weighted derivatives after the atomic half derivative."""
    if two_mu < 1:
        raise InvalidOrder("derivative order must be >= 1/2")
    if two_mu % 2 == 0:
        return diff_int(LEGENDRE, two_mu // 2)
    m = (two_mu - 1) // 2
    op = half_derivative_P()
    for _ in range(m):
        op = compose(weighted_derivative(op.range), op)
    return op


def derivative_U_part(two_mu: int) -> OpTemplate:
    """D^mu on the weighted U part.

    Integer orders walk the weighted-derivative ladder from gamma = 1/2.
    Half-integer orders collapse to a single shifted bidiagonal with the
    exact prefactor 2^m Gamma(m+3/2).
    """
    if two_mu < 1:
        raise InvalidOrder("derivative order must be >= 1/2")
    if two_mu % 2 == 0:
        op = identity(CHEB_U_HALF)
        for _ in range(two_mu // 2):
            op = compose(weighted_derivative(op.range), op)
        return op
    m = (two_mu - 1) // 2
    if m == 0:
        return half_derivative_U()
    pref = float(gamma_half_ratio(m, "three_half")) * (2.0**m) * SQRT_PI

    def build(n, m=m, pref=pref):
        out = BandedMat.zeros(n, n, 0, m + 1)
        if n > m:
            out.set_diag(m, np.full(n - m, pref))
        if n > m + 1:
            out.set_diag(m + 1, np.full(n - m - 1, pref))
        return out

    return OpTemplate(
        domain=CHEB_U_HALF,
        range=space(Fraction(2 * m + 3, 2)),
        l=0,
        u=m + 1,
        build=build,
    )


# -- block layer ---------------------------------------------------------------


def _check_entry(op: OpTemplate, dom: SpaceDesc, rng: SpaceDesc, where: str):
    if op.domain != dom or op.range != rng:
        raise ShapeMismatch(
            f"block entry {where} maps {op.domain}->{op.range}, "
            f"expected {dom}->{rng}"
        )


@dataclass(frozen=True)
class BlockOp:
    """A 2x2 operator between direct-sum coefficient pairs.

    Entries are OpTemplates or None (structural zero). domain_pair and
    range_pair are the (first, second) spaces on each side; both must be
    sanctioned direct-sum levels.
    """

    domain_pair: tuple[SpaceDesc, SpaceDesc]
    range_pair: tuple[SpaceDesc, SpaceDesc]
    tl: OpTemplate | None = None
    tr: OpTemplate | None = None
    bl: OpTemplate | None = None
    br: OpTemplate | None = None

    def __post_init__(self):
        for pair in (self.domain_pair, self.range_pair):
            if not _sanctioned_pair(*pair):
                raise ShapeMismatch(f"not a direct-sum level: {pair}")
        d, r = self.domain_pair, self.range_pair
        if self.tl is not None:
            _check_entry(self.tl, d[0], r[0], "tl")
        if self.tr is not None:
            _check_entry(self.tr, d[1], r[0], "tr")
        if self.bl is not None:
            _check_entry(self.bl, d[0], r[1], "bl")
        if self.br is not None:
            _check_entry(self.br, d[1], r[1], "br")

    @property
    def entries(self):
        return ((self.tl, self.tr), (self.bl, self.br))

    @property
    def has_dense(self) -> bool:
        return any(
            e is not None and e.dense
            for row in self.entries
            for e in row
        )

    def interleaved_bands(self) -> tuple[int, int]:
        """(lower, upper) bandwidth bound of the interleaved section."""
        lo = up = 0
        for p, row in enumerate(self.entries):
            for q, e in enumerate(row):
                if e is None:
                    continue
                lo = max(lo, 2 * e.l + p - q)
                up = max(up, 2 * e.u + q - p)
        return lo, up

    def section(self, n: int):
        """Interleaved 2n x 2n section: unknown order (a_0, b_0, a_1, ...)."""
        blocks = tuple(
            tuple(None if e is None else e.section(n) for e in row)
            for row in self.entries
        )
        return interleave(blocks, n)

    def __matmul__(self, other: "BlockOp") -> "BlockOp":
        return block_compose(self, other)

    def __add__(self, other: "BlockOp") -> "BlockOp":
        return block_add(self, other)

    def __mul__(self, alpha) -> "BlockOp":
        return block_scale(self, alpha)

    __rmul__ = __mul__


def _compose_opt(a, b):
    if a is None or b is None:
        return None
    return compose(a, b)


def _add_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return add(a, b)


def block_compose(a: BlockOp, b: BlockOp) -> BlockOp:
    if a.domain_pair != b.range_pair:
        raise ShapeMismatch(
            f"cannot compose blocks: {a.domain_pair} != {b.range_pair}"
        )
    return BlockOp(
        domain_pair=b.domain_pair,
        range_pair=a.range_pair,
        tl=_add_opt(_compose_opt(a.tl, b.tl), _compose_opt(a.tr, b.bl)),
        tr=_add_opt(_compose_opt(a.tl, b.tr), _compose_opt(a.tr, b.br)),
        bl=_add_opt(_compose_opt(a.bl, b.tl), _compose_opt(a.br, b.bl)),
        br=_add_opt(_compose_opt(a.bl, b.tr), _compose_opt(a.br, b.br)),
    )


def block_add(a: BlockOp, b: BlockOp) -> BlockOp:
    if a.domain_pair != b.domain_pair or a.range_pair != b.range_pair:
        raise ShapeMismatch("cannot add blocks on different levels")
    return BlockOp(
        domain_pair=a.domain_pair,
        range_pair=a.range_pair,
        tl=_add_opt(a.tl, b.tl),
        tr=_add_opt(a.tr, b.tr),
        bl=_add_opt(a.bl, b.bl),
        br=_add_opt(a.br, b.br),
    )


def block_scale(a: BlockOp, alpha) -> BlockOp:
    def s(e):
        return None if e is None else scale(e, alpha)

    return BlockOp(
        domain_pair=a.domain_pair,
        range_pair=a.range_pair,
        tl=s(a.tl),
        tr=s(a.tr),
        bl=s(a.bl),
        br=s(a.br),
    )


def block_identity(two_level: int = 0) -> BlockOp:
    pair = level_spaces(two_level)
    return BlockOp(
        domain_pair=pair,
        range_pair=pair,
        tl=identity(pair[0]),
        br=identity(pair[1]),
    )


def block_integral(two_mu: int) -> BlockOp:
    """Q^mu on the solution family, two_mu = 2 mu >= 1. Stays at level 0."""
    if two_mu < 1:
        raise InvalidOrder("integral order must be >= 1/2")
    pair = level_spaces(0)
    atom = BlockOp(
        domain_pair=pair,
        range_pair=pair,
        tr=half_integral_U(),
        bl=half_integral_P(),
    )
    out = atom
    for _ in range(two_mu - 1):
        out = block_compose(atom, out)
    return out


def block_derivative(two_mu: int) -> BlockOp:
    """D^mu on the solution family: level 0 -> level mu."""
    if two_mu < 1:
        raise InvalidOrder("derivative order must be >= 1/2")
    dom = level_spaces(0)
    rng = level_spaces(two_mu)
    if two_mu % 2 == 0:
        return BlockOp(
            domain_pair=dom,
            range_pair=rng,
            tl=derivative_P_part(two_mu),
            br=derivative_U_part(two_mu),
        )
    return BlockOp(
        domain_pair=dom,
        range_pair=rng,
        tr=derivative_U_part(two_mu),
        bl=derivative_P_part(two_mu),
    )


def block_conversion_step(two_level: int) -> BlockOp:
    """One half-step lift: level (two_level-1)/2 -> level two_level/2.

    Into a half-integer level both parts convert (S on the first, weight
    absorption on the second); into an integer level the first part is
    already there and only the second converts.
    """
    if two_level < 1:
        raise InvalidLevel("conversion lifts to levels >= 1/2")
    dom = level_spaces(two_level - 1)
    rng = level_spaces(two_level)
    if two_level % 2 == 1:
        return BlockOp(
            domain_pair=dom,
            range_pair=rng,
            tl=conversion(dom[0]),
            br=weight_absorb(dom[1]),
        )
    return BlockOp(
        domain_pair=dom,
        range_pair=rng,
        tl=identity(dom[0]),
        br=conversion(dom[1]),
    )


def block_conversion_chain(two_from: int, two_to: int) -> BlockOp:
    """Lift level two_from/2 up to level two_to/2 by composed half-steps."""
    if two_to < two_from:
        raise InvalidLevel("conversion chain cannot descend")
    out = block_identity(two_from)
    for j in range(two_from + 1, two_to + 1):
        out = block_compose(block_conversion_step(j), out)
    return out


def _shift_weight_in(leg_coeffs) -> np.ndarray:
    """Legendre coefficients of (1+x) f given those of f."""
    c = np.asarray(leg_coeffs, dtype=complex)
    out = jacobi_apply(0.5, c, out_len=c.size + 1)
    out[: c.size] += c
    return out


def _rebase_legendre(space: SpaceDesc, leg_coeffs) -> np.ndarray:
    """Coefficients of the same polynomial in C^(space.lam), from Legendre.

    Runs the coefficient vector up the conversion ladder (through the
    triangular Legendre-to-U connection when the target family sits on the
    integer-lambda side). Each step is exact on polynomials, so this is a
    change of basis, not an approximation.
    """
    vec = np.asarray(leg_coeffs, dtype=complex)
    if vec.size == 0:
        return vec
    m = vec.size
    if space.two_lambda % 2 == 1:
        two_lam = 1
    else:
        plain_u = SpaceDesc(2, 0)
        vec = connect_P_to_U(LEGENDRE, plain_u).section(m).matvec(vec)
        two_lam = 2
    while two_lam < space.two_lambda:
        vec = conversion(SpaceDesc(two_lam, 0)).section(m).matvec(vec)
        two_lam += 2
    return vec


def block_multiplication(two_level: int, r_leg, s_leg=None) -> BlockOp:
    """Multiplication by r(x) + (1+x)^(1/2) s(x) at a ladder level.

    r_leg and s_leg are Legendre coefficient vectors of the smooth factors.
    The weighted part s couples the two components through the triangular
    U <-> Legendre connection operators, which is only meaningful on the
    solution family itself; levels above 0 accept r only.
    """
    pair = level_spaces(two_level)
    r = np.asarray(r_leg, dtype=complex)
    s = None if s_leg is None else np.asarray(s_leg, dtype=complex)
    if s is not None and (s.size == 0 or not np.any(s)):
        s = None
    if s is not None and two_level != 0:
        raise UnsupportedWeightedCoefficient(
            "a sqrt(1+x)-weighted coefficient is only supported on the "
            "solution family (level 0)"
        )
    tl = multiplication(pair[0], _rebase_legendre(pair[0], r))
    br = multiplication(pair[1], _rebase_legendre(pair[1], r))
    if s is None:
        return BlockOp(domain_pair=pair, range_pair=pair, tl=tl, br=br)
    # (r + w s)(a + w b) = [r a + (1+x) s b] + w [s a + r b],  w = sqrt(1+x).
    # The cross terms run through the triangular U <-> Legendre connections,
    # built in the unweighted U space and relabelled onto the weighted part
    # (the weight never touches the coefficients themselves).
    plain_U = pair[1].with_gamma(0)
    to_U = connect_P_to_U(pair[0], plain_U)
    to_P = connect_U_to_P(plain_U, pair[0])
    tr0 = compose(
        to_P,
        multiplication(plain_U, _rebase_legendre(plain_U, _shift_weight_in(s))),
    )
    tr = OpTemplate(
        domain=pair[1], range=pair[0], l=tr0.l, u=tr0.u, build=tr0.build, dense=True
    )
    bl0 = compose(multiplication(plain_U, _rebase_legendre(plain_U, s)), to_U)
    bl = OpTemplate(
        domain=pair[0], range=pair[1], l=bl0.l, u=bl0.u, build=bl0.build, dense=True
    )
    return BlockOp(domain_pair=pair, range_pair=pair, tl=tl, tr=tr, bl=bl, br=br)


# -- evaluation functionals ----------------------------------------------------


def _ultra_row(lam: float, x: float, n: int) -> np.ndarray:
    """[C_0^(lam)(x), ..., C_{n-1}^(lam)(x)] by forward recurrence."""
    out = np.empty(n)
    if n == 0:
        return out
    out[0] = 1.0
    if n == 1:
        return out
    out[1] = 2.0 * lam * x
    for k in range(1, n - 1):
        out[k + 1] = (
            2.0 * (k + lam) * x * out[k] - (k + 2.0 * lam - 1.0) * out[k - 1]
        ) / (k + 1.0)
    return out


def boundary_row(pair: tuple[SpaceDesc, SpaceDesc], x: float, n: int) -> np.ndarray:
    """Evaluation-at-x functional on interleaved coefficients, length 2n.

    At x = -1 the weighted part vanishes for positive weight exponents and
    the row is exactly (1, 0, -1, 0, 1, ...) on the solution family; at
    x = +1 it is (1, sqrt(2), 1, 2 sqrt(2), ...). Both fall out of the
    recurrence without special-casing.
    """
    sa, sb = pair
    if x < -1.0 or x > 1.0:
        raise InvalidParameter("evaluation point must lie in [-1, 1]")
    row = np.zeros(2 * n)
    row[0::2] = _ultra_row(float(sa.lam), x, n)
    gb = float(sb.gamma)
    if x == -1.0 and gb > 0:
        return row  # weight kills the second part
    if x == -1.0 and gb < 0:
        raise WeightSingularity(
            f"cannot evaluate a (1+x)^{sb.gamma} expansion at x = -1"
        )
    wb = (1.0 + x) ** gb
    row[1::2] = wb * _ultra_row(float(sb.lam), x, n)
    return row


def apply_block(op: BlockOp, a: np.ndarray, b: np.ndarray):
    """Apply a BlockOp to a coefficient pair exactly (sections padded so no
    contribution is truncated). Returns the (first, second) result pair."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    grow = 0
    for row in op.entries:
        for e in row:
            if e is not None:
                grow = max(grow, e.l)
    m = max(a.size, b.size) + grow
    vec = np.zeros(2 * m, dtype=complex)
    vec[0 : 2 * a.size : 2] = a
    vec[1 : 2 * b.size : 2] = b
    out = op.section(m).matvec(vec)
    return out[0::2], out[1::2]
