"""Assembly of interleaved linear systems from problem descriptions.

Integral problems stay at level 0 of the space ladder.  Derivative problems
send every term to the range family of the highest-order derivative by
composing with conversion half-steps, then swap constraint rows in for the
top operator rows.  Caputo problems are reformulated around v = u^(ceil mu)
with the low-order polynomial coefficients kept as extra dense unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .banded import AlmostBandedMat, BandedMat, DenseMat, mat_add, mat_mul
from .errors import InsufficientConstraints, InvalidSpec
from .fractional import (
    block_add,
    block_compose,
    block_conversion_chain,
    block_derivative,
    block_identity,
    block_integral,
    block_multiplication,
    boundary_row,
    level_spaces,
)
from .problems import CoeffFn, ProblemSpec, Term, TermKind
from .spaces import Fun, SumFun, eval_ultra
from .transforms import cheb_to_legendre, convert_T_to_U
from .operators import conversion


def _lift_lambda(space, coeffs, steps):
    """Apply `steps` successive conversion operators to a coefficient vector."""
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(steps):
        op = conversion(space)
        c = op.build(c.size).matvec(c)
        space = op.range
    return c


def decompose_rhs(rhs: CoeffFn, pair, tol) -> SumFun:
    """Expand a two-part right-hand side over a range family.

    The smooth part lands in the first space of the pair (via Legendre), the
    weighted part in the second (via Chebyshev U); the weight attached to the
    second space never touches the coefficients.
    """
    e_T, f_T = rhs.chebT_parts(tol)
    if e_T is None:
        e = np.zeros(1, dtype=complex)
    else:
        steps = (pair[0].two_lambda - 1) // 2
        e = _lift_lambda(level_spaces(0)[0], cheb_to_legendre(e_T), steps)
    if f_T is None:
        f = np.zeros(1, dtype=complex)
    else:
        steps = pair[1].two_lambda // 2 - 1
        base = pair[1].with_gamma(0).with_lambda(1)
        f = _lift_lambda(base, convert_T_to_U(f_T), steps)
    return SumFun(Fun(pair[0], e), Fun(pair[1], f))


def coefficient_block(two_level: int, cf: CoeffFn | None, tol):
    """Multiplication block for a coefficient, None when it is trivially 1."""
    if cf is None or cf.is_unit():
        return None
    e_T, f_T = cf.chebT_parts(tol)
    r = cheb_to_legendre(e_T) if e_T is not None else np.zeros(1, dtype=complex)
    s = cheb_to_legendre(f_T) if f_T is not None else None
    return block_multiplication(two_level, r, s)


def _compose_all(factors):
    """Compose the non-None blocks left to right; identity when all absent."""
    present = [f for f in factors if f is not None]
    if not present:
        return block_identity(0)
    out = present[0]
    for f in present[1:]:
        out = block_compose(out, f)
    return out


def _term_level(t: Term) -> int:
    return t.two_order if t.kind is TermKind.DERIVATIVE_RL else 0


def _base_term_block(t: Term, tol):
    """The term's operator before any lifting, with range at _term_level."""
    if t.kind is TermKind.DERIVATIVE_RL:
        core = block_derivative(t.two_order)
    elif t.kind is TermKind.INTEGRAL:
        core = block_integral(t.two_order)
    else:
        core = None
    left = coefficient_block(_term_level(t), t.left, tol)
    right = coefficient_block(0, t.right, tol)
    return _compose_all([left, core, right])


def assemble_fie(spec: ProblemSpec, n: int):
    """Interleaved 2n x 2n section and right-hand side for integral problems."""
    for t in spec.terms:
        if t.kind not in (TermKind.INTEGRAL, TermKind.IDENTITY):
            raise InvalidSpec(
                "integral assembly only accepts integral and identity terms"
            )
    tol = spec.tolerance
    total = None
    for t in spec.terms:
        op = _base_term_block(t, tol)
        total = op if total is None else block_add(total, op)
    mat = total.section(n)
    rhs = decompose_rhs(spec.rhs, level_spaces(0), tol).interleaved(n)
    return mat, rhs


def assemble_fde_rl(spec: ProblemSpec, n: int):
    """Bordered section for derivative problems in the left-sided sense.

    Constraint rows replace the trailing operator rows, keeping the square
    2n x 2n shape: the system stays almost banded (or banded below, dense
    above, when a weighted coefficient forced dense entries).
    """
    if any(t.kind is TermKind.DERIVATIVE_CAPUTO for t in spec.terms):
        raise InvalidSpec("left-sided assembly cannot take Caputo terms")
    tol = spec.tolerance
    two_top = spec.two_order_max
    total = None
    for t in spec.terms:
        op = _base_term_block(t, tol)
        lvl = _term_level(t)
        if lvl < two_top:
            op = block_compose(block_conversion_chain(lvl, two_top), op)
        total = op if total is None else block_add(total, op)
    body = total.section(n)
    rhs_full = decompose_rhs(spec.rhs, level_spaces(two_top), tol).interleaved(n)
    K = len(spec.constraints)
    if K == 0:
        return body, rhs_full
    if K > 2 * n:
        raise InvalidSpec("more constraints than unknowns")
    border = np.stack(
        [boundary_row(level_spaces(0), c.point, n) for c in spec.constraints]
    )
    values = np.array([c.value for c in spec.constraints], dtype=complex)
    rhs = np.concatenate([values, rhs_full[: 2 * n - K]])
    if isinstance(body, BandedMat):
        return AlmostBandedMat(border, body.crop(2 * n - K, 2 * n)), rhs
    arr = np.vstack([border, body.toarray()[: 2 * n - K]])
    return DenseMat(arr, l=body.l + K), rhs


def legendre_derivative_coeffs(j: int, k: int) -> np.ndarray:
    """Legendre coefficients of the k-th derivative of P_j, exactly.

    Uses the classical expansion of P'_m over lower-degree Legendre
    polynomials; everything stays in small integers.
    """
    c = np.zeros(j + 1)
    c[j] = 1.0
    for _ in range(k):
        if c.size == 1:
            return np.zeros(1)
        d = np.zeros(c.size - 1)
        for m in range(1, c.size):
            if c[m]:
                idx = np.arange(m - 1, -1, -2)
                d[idx] += (2 * idx + 1) * c[m]
        c = d
    return c


def _legendre_value(j: int, x: float) -> float:
    e = np.zeros(j + 1)
    e[j] = 1.0
    return eval_ultra(Fraction(1, 2), e, x).real


@dataclass
class CaputoSystem:
    """The bordered system for the integral reformulation.

    Unknowns are (c_0 .. c_{M-1}, v) where u = Q^M v + sum c_j P_j.  The top
    rows carry the constraints, `left` the dense polynomial columns, `body`
    the banded operator acting on v; `lift` is the Q^M section that maps the
    solved v back to u.
    """

    top: np.ndarray
    left: np.ndarray
    body: object
    rhs_top: np.ndarray
    rhs_body: np.ndarray
    m_order: int
    lift: object


def _mm(a, b):
    """Section product with None playing the identity."""
    if a is None:
        return b
    if b is None:
        return a
    return mat_mul(a, b)


def _apply_sec(mat, vec):
    return vec if mat is None else mat.matvec(vec)


def assemble_fde_caputo(spec: ProblemSpec, n: int) -> CaputoSystem:
    """Bordered system for the reformulation around v = u^(ceil mu).

    All operator factors here are multiplied as 2n x 2n sections rather than
    as sections of the composed infinite operators.  That keeps the discrete
    algebra factorable (the section of Q^p is exactly the p-th power of the
    half-integral section), which is what makes the reformulated system
    converge spectrally; composing first and truncating after perturbs the
    trailing entries by O(1/n) and stalls convergence near the boundary.
    """
    tol = spec.tolerance
    two_top = spec.two_order_max
    M = (two_top + 1) // 2
    K = len(spec.constraints)
    if K < M:
        raise InsufficientConstraints(f"need exactly {M} constraints, got {K}")
    if K > M:
        raise InvalidSpec(f"need exactly {M} constraints, got {K}")
    pair0 = level_spaces(0)
    atom = block_integral(1).section(n)
    powers = {1: atom}

    def qsec(p):
        if p == 0:
            return None
        if p not in powers:
            powers[p] = mat_mul(qsec(p - 1), atom)
        return powers[p]

    def unit_col(j):
        e = np.zeros(2 * n, dtype=complex)
        e[2 * j] = 1.0
        return e

    lift_sec = qsec(2 * M)
    body = None
    cols = np.zeros((2 * n, M), dtype=complex)
    for t in spec.terms:
        left_blk = coefficient_block(0, t.left, tol)
        left_sec = None if left_blk is None else left_blk.section(n)
        if t.kind is TermKind.DERIVATIVE_CAPUTO:
            v_mat = _mm(left_sec, qsec(2 * M - t.two_order))
            k = (t.two_order + 1) // 2
            for j in range(k, M):
                d = legendre_derivative_coeffs(j, k)
                vec = np.zeros(2 * n, dtype=complex)
                vec[0 : 2 * d.size : 2] = d
                vec = _apply_sec(qsec(2 * k - t.two_order), vec)
                cols[:, j] += _apply_sec(left_sec, vec)
        else:
            right_blk = coefficient_block(0, t.right, tol)
            right_sec = None if right_blk is None else right_blk.section(n)
            q_mid = qsec(t.two_order) if t.kind is TermKind.INTEGRAL else None
            base = _mm(_mm(left_sec, q_mid), right_sec)
            v_mat = _mm(base, lift_sec)
            for j in range(M):
                cols[:, j] += _apply_sec(base, unit_col(j))
        if v_mat is None:
            v_mat = BandedMat.identity(2 * n)
        body = v_mat if body is None else mat_add(body, v_mat)
    top = np.zeros((M, M + 2 * n), dtype=complex)
    for i, c in enumerate(spec.constraints):
        row = boundary_row(pair0, c.point, n)
        top[i, M:] = lift_sec.vecmat(row)
        for j in range(M):
            top[i, j] = _legendre_value(j, c.point)
    rhs_body = decompose_rhs(spec.rhs, pair0, tol).interleaved(n)
    rhs_top = np.array([c.value for c in spec.constraints], dtype=complex)
    return CaputoSystem(top, cols, body, rhs_top, rhs_body, M, lift_sec)


def recover_caputo(sys: CaputoSystem, c: np.ndarray, v: np.ndarray) -> SumFun:
    """Map (c, v) back to u = Q^M v + sum c_j P_j on the solution family."""
    pair0 = level_spaces(0)
    u_int = sys.lift.matvec(v)
    u_int[0 : 2 * sys.m_order : 2] += c
    return SumFun(Fun(pair0[0], u_int[0::2]), Fun(pair0[1], u_int[1::2]))
