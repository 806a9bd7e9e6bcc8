import math
from fractions import Fraction

import pytest

from oracles import truncated_sum_exact
from wsfzeta.index_algebra import indices_up_to, ones, star_expand
from wsfzeta.smzv_numeric import (
    rational_reconstruct,
    reference_zeta,
    smzsv_approx,
    smzsv_values,
    smzv_star_approx,
    smzv_star_values,
    truncated_mzv,
    verify_smzv_weighted_sum,
    weighted_symmetric_sum,
)

ZETA2 = math.pi**2 / 6
ZETA3 = 1.2020569031595942


def test_truncated_small_cases():
    assert truncated_mzv((1,), 1).value == 1
    assert truncated_mzv((), 10).value == 1
    assert truncated_mzv((1, 1), 1).value == 0
    assert truncated_mzv((1, 1), 1, star=True).value == 1


@pytest.mark.parametrize("star", [False, True])
def test_truncated_matches_exact_fraction_sum(star):
    for k in indices_up_to(5):
        exact = truncated_sum_exact(k, 20, star)
        got = truncated_mzv(k, 20, star).value
        assert abs(got - exact) <= Fraction(1, 10**12) * exact, k


def test_truncated_converges_to_classical_values():
    M = 10**5
    assert abs(float(truncated_mzv((2,), M)) - ZETA2) < 1.5 / M
    assert abs(float(truncated_mzv((3,), M)) - ZETA3) < 1 / M**2
    # Euler: zeta(1,2) = zeta(3)
    assert abs(float(truncated_mzv((1, 2), M)) - ZETA3) < 20 / M


def test_reference_constants():
    assert reference_zeta(2, 10**6) == pytest.approx(ZETA2, rel=1e-14)
    assert reference_zeta(3, 10**6) == pytest.approx(ZETA3, rel=1e-14)
    with pytest.raises(ValueError):
        reference_zeta(1, 10)


def test_symmetric_exact_cancellation():
    for M in (1, 7, 1000):
        assert smzv_star_approx((1,), M).value == 0
        assert smzv_star_approx(ones(3), M).value == 0
    for r in (1, 3, 5, 7):
        assert smzv_star_values(ones(r), (100, 2000)) == [0, 0]


def test_symmetric_1_2_tends_to_3_zeta3():
    approx = smzv_star_approx((1, 2), 10**5)
    assert abs(float(approx.value) - 3 * ZETA3) < 1e-3
    assert approx.cauchy_gap < 1e-3


def test_smzsv_definition():
    M = 3000
    assert smzsv_approx((4,), M).value == smzv_star_approx((4,), M).value
    assert smzsv_approx((1, 1), M).value == smzv_star_approx((1, 1), M).value + smzv_star_approx((2,), M).value
    # the star-symmetric value is built from exactly the symbolic star expansion
    expected = sum((c * smzv_star_values(j, (M,))[0] for j, c in star_expand((1, 2)).items()), Fraction(0))
    assert smzsv_values((1, 2), (M,))[0] == expected


def test_cauchy_gap_shrinks():
    cutoffs = tuple(2**e for e in range(10, 19))
    for k in [(1, 2), (2, 1), (1, 1, 2), (2, 3), (1, 2, 2), (3, 1, 1)]:
        vals = [float(v) for v in smzv_star_values(k, cutoffs)]
        gaps = [abs(b - a) for a, b in zip(vals, vals[1:])]
        for g0, g1 in zip(gaps, gaps[1:]):
            assert g1 == 0 or g0 / g1 >= 1.5, (k, gaps)


@pytest.mark.parametrize(
    "x, max_den, tol, expected",
    [
        (0.74999999, 100, 1e-6, Fraction(3, 4)),
        (0.333333333, 10, 1e-6, Fraction(1, 3)),
        (3.14159265, 10, 1e-6, None),
        (-5.9995, 64, 1e-3, Fraction(-6)),
        (0.0, 64, 1e-3, Fraction(0)),
        (3.14159265, 200, 1e-6, Fraction(355, 113)),
    ],
)
def test_rational_reconstruct(x, max_den, tol, expected):
    assert rational_reconstruct(x, max_den, tol) == expected


def test_weighted_sum_weight_three_is_exactly_zero():
    for M in (10, 10**4):
        for r, i in [(1, 1), (3, 1), (3, 2), (3, 3)]:
            assert weighted_symmetric_sum(3, r, i, (M,)) == [0]
    rep = verify_smzv_weighted_sum(3, 3, 1, M=10**4)
    assert rep.passed and rep.S == 0 and rep.basis == "none" and rep.q is None


def test_weighted_sum_weight_five():
    rep = verify_smzv_weighted_sum(5, 3, 1, M=10**5)
    assert rep.passed and rep.status == "verified"
    assert rep.basis == "zeta2*zeta3"
    assert rep.q.denominator <= 64
    assert rep.residual <= 1e-3
    rep2 = verify_smzv_weighted_sum(5, 3, 2, M=10**5, star=True)
    assert rep2.passed
    doc = rep.to_json()
    assert set(doc) >= {"identity", "params", "S", "basis", "q", "residual", "pass"}
    assert doc["params"] == {"k": 5, "r": 3, "i": 1, "star": False, "M": 10**5}


def test_even_weight_is_only_consistent():
    rep = verify_smzv_weighted_sum(2, 1, 1, M=10**4)
    # 4 * (2 zeta(2)) = 8 zeta(2) up to truncation
    assert rep.basis == "zeta2" and rep.q == 8
    assert rep.status == "consistent"


def test_unsupported_parameters():
    with pytest.raises(ValueError):
        verify_smzv_weighted_sum(6, 3, 1)
    with pytest.raises(ValueError):
        verify_smzv_weighted_sum(5, 2, 1)
    with pytest.raises(ValueError):
        verify_smzv_weighted_sum(5, 3, 4)
