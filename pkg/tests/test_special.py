"""Complementary error function and exact half-integer gamma ratios."""

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special

from fracband.errors import DomainError, InvalidParameter
from fracband.special import erfc, gamma_half_ratio


def test_erfc_at_zero():
    assert erfc(0.0) == 1.0


# Correctly rounded doubles, computed once with mpmath at 40 digits and
# frozen here so the accuracy contract is checked against ground truth
# rather than against another double-precision library.
ERFC_TABLE = [
    (0.03125, 0.9647496261326772),
    (0.125, 0.8596837951986662),
    (0.25, 0.7236736098317631),
    (0.375, 0.5958830905651777),
    (0.5, 0.4795001221869535),
    (0.625, 0.376759117811582),
    (0.75, 0.28884436634648486),
    (0.875, 0.21592493894014034),
    (1.0, 0.15729920705028513),
    (1.125, 0.11161176829829224),
    (1.25, 0.07709987174354177),
    (1.375, 0.051829927217909674),
    (1.5, 0.033894853524689274),
    (1.75, 0.013328328780817557),
    (2.0, 0.004677734981047266),
    (2.25, 0.0014627165866811518),
    (2.5, 0.0004069520174449589),
    (2.75, 0.00010062192211963683),
    (3.0, 2.209049699858544e-05),
    (3.5, 7.430983723414128e-07),
    (4.0, 1.541725790028002e-08),
    (4.5, 1.9661604415428876e-10),
    (5.0, 1.537459794428035e-12),
    (5.5, 7.357847917974398e-15),
    (6.0, 2.1519736712498913e-17),
]


def test_erfc_at_one():
    assert erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-15, abs=0.0)


def test_erfc_product_value():
    # closed-form solution value at x = 0: e * erfc(1)
    assert math.e * erfc(1.0) == pytest.approx(0.4275835761558070, rel=5e-15)


def test_erfc_meets_contract_on_frozen_table():
    for z, ref in ERFC_TABLE:
        assert erfc(z) == pytest.approx(ref, rel=1e-15, abs=0.0)


def test_erfc_tracks_scipy_across_range():
    # scipy itself drifts a few ulp at large z, so this sweep is a sanity
    # net at a looser tolerance; the hard contract lives in the table test.
    zs = np.linspace(0.0, 6.0, 121)
    ours = np.array([erfc(z) for z in zs])
    ref = scipy.special.erfc(zs)
    assert np.max(np.abs(ours / ref - 1.0)) <= 5e-15


def test_erfc_strictly_decreasing():
    zs = np.linspace(0.0, 6.0, 200)
    vals = [erfc(z) for z in zs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_erfc_rejects_negative_and_nan():
    with pytest.raises(DomainError):
        erfc(-1e-12)
    with pytest.raises(DomainError):
        erfc(float("nan"))


def test_erf_complement_identity():
    # erf from an independent implementation; the two must sum to 1
    zs = np.linspace(0.0, 2.0, 20)
    for z in zs:
        assert erfc(z) + scipy.special.erf(z) == pytest.approx(1.0, abs=1e-14)


def test_gamma_half_ratio_values():
    assert gamma_half_ratio(0, "half") == Fraction(1)
    assert gamma_half_ratio(1, "half") == Fraction(1, 2)
    assert gamma_half_ratio(0, "three_half") == Fraction(1, 2)
    assert gamma_half_ratio(2, "three_half") == Fraction(15, 8)


def test_gamma_half_ratio_matches_gamma_function():
    for m in range(8):
        assert float(gamma_half_ratio(m, "half")) == pytest.approx(
            math.gamma(m + 0.5) / math.sqrt(math.pi), rel=1e-14
        )
        assert float(gamma_half_ratio(m, "three_half")) == pytest.approx(
            math.gamma(m + 1.5) / math.sqrt(math.pi), rel=1e-14
        )


def test_gamma_half_ratio_recurrence_exact():
    for m in range(20):
        step = gamma_half_ratio(m + 1, "half") / gamma_half_ratio(m, "half")
        assert step == Fraction(2 * m + 1, 2)


def test_gamma_half_ratio_rejects_bad_m():
    with pytest.raises(InvalidParameter):
        gamma_half_ratio(-1)
    with pytest.raises(InvalidParameter):
        gamma_half_ratio(2, "quarter")
