"""Coefficient spaces, weighted evaluation, and the direct-sum container."""

import math

import numpy as np
import pytest

import oracles
from fracband.errors import (
    InvalidParameter,
    ShapeMismatch,
    WeightSingularity,
)
from fracband.spaces import (
    CHEB_U,
    CHEB_U_HALF,
    LEGENDRE,
    Fun,
    SpaceDesc,
    SumFun,
    eval_fun,
    eval_sumfun,
    eval_ultra,
    space,
    sumfun_from_interleaved,
    trim_coeffs,
)


def test_space_stores_half_integers_exactly():
    s = space(1.5, -0.5)
    assert s.two_lambda == 3 and s.two_gamma == -1
    assert float(s.lam) == 1.5 and float(s.gamma) == -0.5


def test_space_rejects_non_half_integers():
    with pytest.raises(InvalidParameter):
        space(0.3)
    with pytest.raises(InvalidParameter):
        space(1, 0.25)


def test_space_equality_is_structural():
    assert space(1, 0.5) == SpaceDesc(2, 1)
    assert space(1) != space(1, 0.5)


def test_unbounded_at_left_flag():
    assert space(1, -0.5).unbounded_at_left
    assert not space(1, 0.5).unbounded_at_left
    assert not space(1).unbounded_at_left


def test_eval_ultra_degree_one_U():
    assert eval_ultra(1, [0, 1], 0.5) == pytest.approx(1.0, abs=1e-15)


def test_eval_ultra_legendre_at_right_end():
    assert eval_ultra(0.5, [0, 0, 1], 1.0) == pytest.approx(1.0, abs=1e-15)


def test_eval_ultra_matches_forward_recurrence():
    want = oracles.ultra(1.5, 3, 0.3)
    got = eval_ultra(1.5, [0, 0, 0, 1], 0.3)
    assert got == pytest.approx(want, abs=1e-14)


def test_eval_ultra_empty_is_zero():
    assert eval_ultra(1, [], 0.2) == 0.0


def test_eval_ultra_rejects_nonpositive_lambda():
    with pytest.raises(InvalidParameter):
        eval_ultra(0, [1.0], 0.3)
    with pytest.raises(InvalidParameter):
        eval_ultra(-0.5, [1.0], 0.3)


def test_eval_fun_weighted_constant():
    f = Fun(CHEB_U_HALF, (1.0,))
    assert eval_fun(f, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_eval_fun_weighted_U1_at_right_end():
    f = Fun(CHEB_U_HALF, (0.0, 1.0))
    assert eval_fun(f, 1.0) == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-15)


def test_eval_fun_negative_weight_singular_at_left_end():
    f = Fun(space(1, -0.5), (1.0,))
    with pytest.raises(WeightSingularity):
        eval_fun(f, -1.0)


def test_sumfun_constant_parts():
    u = SumFun(Fun(LEGENDRE, (1.0,)), Fun(CHEB_U_HALF, (1.0,)))
    assert eval_sumfun(u, 0.0) == pytest.approx(2.0, abs=1e-15)


def test_sumfun_weight_annihilates_U_part_at_left_end():
    u = SumFun(Fun(LEGENDRE, (0.0,)), Fun(CHEB_U_HALF, (0.0, 1.0)))
    assert eval_sumfun(u, -1.0) == 0.0


def test_sumfun_mixed_value():
    u = SumFun(Fun(LEGENDRE, (1.0, 1.0)), Fun(CHEB_U_HALF, (2.0,)))
    want = 1.25 + 2.0 * math.sqrt(1.25)
    assert eval_sumfun(u, 0.25) == pytest.approx(want, rel=1e-15)


def test_sumfun_rejects_unsanctioned_pair():
    with pytest.raises(ShapeMismatch):
        SumFun(Fun(CHEB_U, (1.0,)), Fun(CHEB_U_HALF, (1.0,)))


def test_sumfun_accepts_range_pairs():
    # level-1/2 and level-1 range pairs of the operator ladder
    SumFun(Fun(space(1.5), (1.0,)), Fun(space(1, -0.5), (1.0,)))
    SumFun(Fun(space(1.5), (1.0,)), Fun(space(2, -0.5), (1.0,)))


def test_trim_coeffs_drops_trailing_noise():
    out = trim_coeffs([1.0, 0.5, 1e-17, 1e-18], 1e-15)
    assert len(out) == 2


def test_trim_coeffs_keeps_at_least_one():
    out = trim_coeffs([0.0, 0.0], 1e-15)
    assert len(out) == 1


def test_interleaved_layout_and_round_trip():
    a = np.array([1.0, 2.0, 3.0])
    b = np.array([4.0, 5.0])
    u = SumFun(Fun(LEGENDRE, a), Fun(CHEB_U_HALF, b))
    vec = u.interleaved(3)
    assert vec.tolist() == [1.0, 4.0, 2.0, 5.0, 3.0, 0.0]
    back = sumfun_from_interleaved(vec, (LEGENDRE, CHEB_U_HALF))
    xs = np.linspace(-1.0, 1.0, 7)
    assert np.allclose([back(x) for x in xs], [u(x) for x in xs], atol=1e-15)


def test_fun_call_matches_eval_fun():
    f = Fun(CHEB_U_HALF, (0.3, -0.2, 0.1))
    for x in (-0.5, 0.0, 0.8):
        assert f(x) == eval_fun(f, x)
