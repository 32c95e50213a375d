"""System assembly: RHS decomposition, integral and derivative pipelines,
and the Caputo reformulation."""

import math

import numpy as np
import pytest

import oracles
from fracband.assembly import (
    assemble_fde_caputo,
    assemble_fde_rl,
    assemble_fie,
    decompose_rhs,
    legendre_derivative_coeffs,
)
from fracband.banded import (
    BandedMat,
    DenseMat,
    mat_mul,
    solve_almost_banded,
    solve_banded,
    solve_lower_banded,
)
from fracband.errors import InsufficientConstraints, InvalidSpec
from fracband.fractional import (
    block_integral,
    boundary_row,
    half_derivative_P,
    half_derivative_U,
    half_integral_P,
    half_integral_U,
    level_spaces,
)
from fracband.operators import conversion, weight_absorb
from fracband.problem_io import load_problem
from fracband.problems import (
    CoeffFn,
    Constraint,
    ProblemSpec,
    Term,
    TermKind,
    term,
)
from fracband.spaces import CHEB_U_HALF, LEGENDRE, sumfun_from_interleaved

SQRT_PI = math.sqrt(math.pi)


def interleave_dense(b00, b01, b10, b11):
    n = b00.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[0::2, 0::2] = b00
    out[0::2, 1::2] = b01
    out[1::2, 0::2] = b10
    out[1::2, 1::2] = b11
    return out


def abel_spec(n=None):
    return ProblemSpec(
        terms=(term("identity"), term("integral", 0.5)),
        rhs=CoeffFn(smooth=1.0),
        n=n,
    )


# -- right-hand side decomposition ------------------------------------------------


def test_decompose_constant_rhs():
    out = decompose_rhs(CoeffFn(smooth=1.0), level_spaces(0), 1e-14)
    assert abs(out.first.coeffs[0] - 1.0) < 1e-15
    assert np.abs(out.first.coeffs[1:]).max(initial=0.0) < 1e-15
    assert np.abs(out.second.coeffs).max() < 1e-15


def test_decompose_weighted_rhs_on_derivative_range():
    out = decompose_rhs(
        CoeffFn(weighted=1.0 / SQRT_PI), level_spaces(1), 1e-14
    )
    assert abs(out.second.coeffs[0] - 1.0 / SQRT_PI) < 1e-16
    assert np.abs(out.second.coeffs[1:]).max(initial=0.0) < 1e-15
    assert np.abs(out.first.coeffs).max() < 1e-15


def test_decompose_reevaluates_smooth_part():
    out = decompose_rhs(CoeffFn(smooth=np.exp), level_spaces(0), 1e-14)
    for x in np.linspace(-0.95, 0.95, 10):
        assert abs(out(x) - math.exp(x)) < 1e-13


def test_decompose_frame_consistency():
    rhs = CoeffFn(smooth=lambda x: np.cos(2.0 * x), weighted=np.exp)
    out = decompose_rhs(rhs, level_spaces(0), 1e-14)
    pts = np.cos(np.pi * (2 * np.arange(20) + 1) / 40.0)
    for x in pts:
        want = math.cos(2.0 * x) + math.sqrt(1.0 + x) * math.exp(x)
        assert abs(out(x) - want) < 1e-13


def test_decompose_lifts_to_higher_levels():
    out = decompose_rhs(CoeffFn(smooth=np.exp), level_spaces(2), 1e-14)
    assert out.first.space == level_spaces(2)[0]
    for x in (-0.6, 0.0, 0.8):
        assert abs(out(x) - math.exp(x)) < 1e-13


# -- integral assembly --------------------------------------------------------------


def test_assemble_fie_identity_plus_half_integral():
    mat, rhs = assemble_fie(abel_spec(), 4)
    eye = np.eye(4)
    want = interleave_dense(
        eye,
        half_integral_U().section(4).toarray(),
        half_integral_P().section(4).toarray(),
        eye,
    )
    assert np.array_equal(mat.toarray(), want)
    assert isinstance(mat, BandedMat) and mat.l == 1 and mat.u == 1
    assert abs(rhs[0] - 1.0) < 1e-15
    assert np.abs(rhs[1:]).max() < 1e-15


def test_assemble_fie_tridiagonal_solve_residual():
    mat, rhs = assemble_fie(abel_spec(), 4)
    x = solve_banded(mat, rhs)
    assert np.abs(mat.matvec(x) - rhs).max() < 1e-14


def test_assemble_fie_five_term_action():
    spec = load_problem(oracles.PROBLEM_DIR / "multi_order_integral.json")
    n = 16
    mat, _ = assemble_fie(spec, n)
    rng = np.random.default_rng(3)
    a = rng.standard_normal(6)
    b = rng.standard_normal(6)
    vec = np.zeros(2 * n, dtype=complex)
    vec[0:12:2] = a
    vec[1:13:2] = b
    got = mat.matvec(vec)
    from fracband.fractional import apply_block

    acc_a = np.concatenate([a, np.zeros(n - 6)]).astype(complex)
    acc_b = np.concatenate([b, np.zeros(n - 6)]).astype(complex)
    total_a, total_b = acc_a.copy(), acc_b.copy()
    for sign, two_mu in ((-1, 1), (1, 2), (-1, 3), (1, 4)):
        pa, pb = apply_block(block_integral(two_mu), acc_a, acc_b)
        total_a += sign * pa[:n]
        total_b += sign * pb[:n]
    want = np.zeros(2 * n, dtype=complex)
    want[0::2] = total_a
    want[1::2] = total_b
    assert np.abs(got - want).max() < 1e-13


def test_assemble_fie_smooth_coefficients_stay_banded():
    spec = load_problem(oracles.PROBLEM_DIR / "abel_exp_coeffs.json")
    spec = ProblemSpec(
        terms=spec.terms, rhs=spec.rhs, tolerance=1e-15, n=spec.n
    )
    mat, _ = assemble_fie(spec, 100)
    assert isinstance(mat, BandedMat)
    assert 35 <= max(mat.l, mat.u) <= 55


def test_assemble_fie_rejects_derivative_terms():
    spec = ProblemSpec(
        terms=(term("identity"), term("derivative_rl", 0.5)),
        rhs=CoeffFn(smooth=1.0),
    )
    with pytest.raises(InvalidSpec):
        assemble_fie(spec, 8)


# -- left-sided derivative assembly ----------------------------------------------------


def relaxation_rl_spec(n=None):
    return ProblemSpec(
        terms=(term("identity"), term("derivative_rl", 0.5)),
        rhs=CoeffFn(weighted=1.0 / SQRT_PI),
        n=n,
    )


def test_assemble_fde_rl_level_half_blocks():
    mat, rhs = assemble_fde_rl(relaxation_rl_spec(), 4)
    want = interleave_dense(
        conversion(LEGENDRE).section(4).toarray(),
        half_derivative_U().section(4).toarray(),
        half_derivative_P().section(4).toarray(),
        weight_absorb(CHEB_U_HALF).section(4).toarray(),
    )
    assert np.array_equal(mat.toarray(), want)
    assert abs(rhs[1] - 1.0 / SQRT_PI) < 1e-16


def test_assemble_fde_rl_rejects_caputo_terms():
    spec = ProblemSpec(
        terms=(term("identity"), term("derivative_caputo", 0.5)),
        constraints=(Constraint(-1.0, 1.0),),
    )
    with pytest.raises(InvalidSpec):
        assemble_fde_rl(spec, 8)


def test_assemble_fde_rl_bordering_shape():
    spec = load_problem(oracles.PROBLEM_DIR / "bagley_torvik_rl.json")
    n = 25
    mat, rhs = assemble_fde_rl(spec, 2 * n)
    border_rows = 2
    assert rhs.size == 4 * n
    assert abs(rhs[0] - 1.0) < 1e-16 and abs(rhs[1]) < 1e-16
    x = solve_almost_banded(mat, rhs)
    u = sumfun_from_interleaved(x, level_spaces(0))
    assert abs(u(-1.0) - 1.0) < 1e-12
    assert abs(u(1.0)) < 1e-12
    assert border_rows == len(spec.constraints)


def test_weighted_coefficient_system_is_lower_banded():
    spec = load_problem(oracles.PROBLEM_DIR / "abel_erfc_coeff.json")
    mat, rhs = assemble_fie(spec, 50)
    assert isinstance(mat, DenseMat)
    assert mat.l < 40
    x = solve_lower_banded(mat, rhs)
    resid = np.abs(mat.toarray() @ x - rhs).max()
    assert resid < 1e-12 * max(1.0, np.abs(rhs).max())


# -- Caputo reformulation ----------------------------------------------------------------


def caputo_relaxation_spec(n=None):
    return ProblemSpec(
        terms=(term("identity"), term("derivative_caputo", 0.5)),
        constraints=(Constraint(-1.0, 1.0),),
        n=n,
    )


def test_caputo_counts_constraints():
    spec = ProblemSpec(
        terms=(term("identity"), term("derivative_caputo", 0.5)),
    )
    with pytest.raises(InsufficientConstraints):
        assemble_fde_caputo(spec, 8)
    spec = ProblemSpec(
        terms=(term("identity"), term("derivative_caputo", 0.5)),
        constraints=(Constraint(-1.0, 1.0), Constraint(1.0, 0.0)),
    )
    with pytest.raises(InvalidSpec):
        assemble_fde_caputo(spec, 8)


def test_caputo_relaxation_system_blocks():
    n = 6
    sys = assemble_fde_caputo(caputo_relaxation_spec(), n)
    assert sys.m_order == 1
    assert sys.top.shape == (1, 1 + 2 * n)
    assert sys.top[0, 0] == 1.0
    atom = block_integral(1).section(n)
    q1 = mat_mul(atom, atom)
    want_body = q1.toarray() + atom.toarray()
    assert np.allclose(sys.body.toarray(), want_body, atol=1e-15)
    row = boundary_row(level_spaces(0), -1.0, n)
    assert np.allclose(sys.top[0, 1:], row @ q1.toarray(), atol=1e-15)
    col = np.zeros(2 * n, dtype=complex)
    col[0] = 1.0
    assert np.array_equal(sys.left[:, 0], col)
    assert sys.rhs_top[0] == 1.0


def test_caputo_polynomial_derivative_columns():
    assert np.array_equal(legendre_derivative_coeffs(1, 1), [1.0])
    assert np.array_equal(legendre_derivative_coeffs(2, 1), [0.0, 3.0])
    assert np.array_equal(legendre_derivative_coeffs(3, 1), [1.0, 0.0, 5.0])
    assert np.array_equal(legendre_derivative_coeffs(3, 2), [0.0, 15.0])
    assert np.array_equal(legendre_derivative_coeffs(2, 3), [0.0])


def test_caputo_bagley_torvik_structure():
    spec = load_problem(oracles.PROBLEM_DIR / "bagley_torvik_caputo.json")
    n = 12
    sys = assemble_fde_caputo(spec, n)
    assert sys.m_order == 2
    assert sys.top.shape == (2, 2 + 2 * n)
    assert sys.left.shape == (2 * n, 2)
    # the c_1 column of the half-order term carries Q^(3/2) applied to
    # P_1' = P_0, on top of the identity term's P_1 column
    assert np.abs(sys.left[:, 1]).max() > 0.0
