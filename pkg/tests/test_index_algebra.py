from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    compositions_by_filter,
    dual_by_complement,
    g1_by_filter,
    phi_by_cut_sets,
    star_by_cut_sets,
)
from wsfzeta.index_algebra import (
    ZERO,
    DimensionError,
    IndexCombination,
    build_F,
    build_G,
    build_G1,
    build_G2,
    build_H,
    compositions,
    depth,
    format_index,
    hoffman_dual,
    indices_up_to,
    ones,
    oplus,
    parse_combination,
    parse_index,
    phi,
    reverse,
    star_expand,
    weak_compositions,
    weight,
)

indices = st.lists(st.integers(1, 4), min_size=1, max_size=5).map(tuple)


def comb_of(*terms):
    return IndexCombination(terms)


# --- elementary operations -------------------------------------------------


@pytest.mark.parametrize("k, w, d", [((1, 2, 2), 5, 3), ((), 0, 0), ((2, 3), 5, 2), (ones(5), 5, 5)])
def test_weight_and_depth(k, w, d):
    assert weight(k) == w
    assert depth(k) == d


def test_oplus():
    assert oplus((2, 3), (1, 0)) == (3, 3)
    assert oplus((2, 3), (0, 0)) == (2, 3)
    assert oplus((1, 1, 1), (0, 2, 0)) == (1, 3, 1)
    with pytest.raises(DimensionError):
        oplus((2, 3), (1,))


def test_reverse():
    assert reverse((1, 2)) == (2, 1)
    assert reverse(()) == ()
    assert reverse((1, 2, 3)) == (3, 2, 1)


def test_compositions():
    assert compositions(3, 2) == [(1, 2), (2, 1)]
    assert compositions(3, 3) == [(1, 1, 1)]
    assert compositions(4, 3) == [(1, 1, 2), (1, 2, 1), (2, 1, 1)]
    for bad in [(3, 4), (3, 0)]:
        with pytest.raises(ValueError):
            compositions(*bad)


@pytest.mark.parametrize("k", range(1, 9))
def test_compositions_match_filter(k):
    for r in range(1, k + 1):
        got = compositions(k, r)
        assert got == compositions_by_filter(k, r)
        assert len(got) == comb(k - 1, r - 1)


def test_weak_compositions_count():
    for l in range(5):
        for n in range(1, 5):
            got = weak_compositions(l, n)
            assert len(got) == len(set(got)) == comb(l + n - 1, l)
            assert all(sum(e) == l and len(e) == n for e in got)


# --- Hoffman dual ------------------------------------------------------------


def test_hoffman_dual_examples():
    assert hoffman_dual((2, 1)) == (1, 2)
    assert hoffman_dual((2, 3)) == (1, 2, 1, 1)
    assert hoffman_dual(ones(3)) == (3,)
    with pytest.raises(ValueError):
        hoffman_dual(())


def test_hoffman_dual_matches_complement_oracle():
    for k in indices_up_to(10):
        assert hoffman_dual(k) == dual_by_complement(k)


def test_dual_is_involution_to_weight_12():
    for k in indices_up_to(12):
        assert hoffman_dual(hoffman_dual(k)) == k


# --- phi and star expansion --------------------------------------------------


def test_phi_example():
    expected = comb_of(((1, 2, 2), -1), ((1, 1, 1, 2), -1), ((1, 2, 1, 1), -1), ((1, 1, 1, 1, 1), -1))
    assert phi((1, 2, 2)) == expected
    assert phi((1, 2, 2)).to_text() == "-(1,2,2) + -(1,1,1,2) + -(1,2,1,1) + -(1,1,1,1,1)"


def test_phi_small():
    assert phi(ones(3)) == comb_of((ones(3), -1))
    assert phi((2,)) == comb_of(((2,), -1), ((1, 1), -1))
    with pytest.raises(ValueError):
        phi(())


def test_phi_matches_cut_set_oracle():
    for k in indices_up_to(8):
        assert phi(k) == IndexCombination(phi_by_cut_sets(k))


def test_phi_involution_to_weight_10():
    for k in indices_up_to(10):
        assert phi(phi(k)) == IndexCombination.single(k)


def test_star_expand():
    assert star_expand((1, 2)) == comb_of(((1, 2), 1), ((3,), 1))
    assert star_expand((7,)) == comb_of(((7,), 1))
    assert star_expand(ones(3)) == comb_of((ones(3), 1), ((2, 1), 1), ((1, 2), 1), ((3,), 1))
    for k in indices_up_to(8):
        assert star_expand(k) == IndexCombination(star_by_cut_sets(k))


@given(indices)
def test_term_counts_and_weight(k):
    p = phi(k)
    assert sum(abs(c) for c in p.values()) == 2 ** (weight(k) - depth(k))
    assert all(weight(j) == weight(k) for j in p)
    s = star_expand(k)
    assert s.total_multiplicity() == 2 ** (depth(k) - 1)
    assert all(weight(j) == weight(k) for j in s)
    assert weight(hoffman_dual(k)) == weight(k)


# --- G operators, F, H -------------------------------------------------------


def test_G1_examples():
    assert build_G1((2, 3), 1) == comb_of(((3, 3), 1), ((2, 4), 1))
    assert build_G1((2, 3), 0) == comb_of(((2, 3), 1))
    assert build_G1((1, 1), 2) == comb_of(((3, 1), 1), ((2, 2), 1), ((1, 3), 1))


def test_G2_examples():
    assert build_G2((2, 3), 1) == comb_of(((1, 2, 3), 1), ((2, 1, 3), 1), ((2, 2, 2), 1), ((2, 3, 1), 1))
    assert build_G2((2, 3), 0) == comb_of(((2, 3), 1))
    assert build_G2((2,), 1) == comb_of(((1, 2), 1), ((2, 1), 1))


def test_G2_by_dual_oracle():
    # (k^dual + e)^dual, assembled from the complement oracle
    for k in [(2, 3), (1, 2, 1), (3,), (1, 1)]:
        kd = dual_by_complement(k)
        expected = {}
        for j, c in g1_by_filter(kd, 2).items():
            jd = dual_by_complement(j)
            expected[jd] = expected.get(jd, 0) + c
        assert build_G2(k, 2) == IndexCombination(expected)


def test_G_examples():
    assert build_G((2, 3), 0) == ZERO
    assert build_G((2,), 1) == comb_of(((3,), 1), ((1, 2), -1), ((2, 1), -1))
    assert build_G(ones(3), 0) == ZERO


@given(indices, st.integers(0, 4))
@settings(max_examples=60)
def test_G1_multiplicity_and_weight(k, l):
    g1 = build_G1(k, l)
    assert g1.total_multiplicity() == comb(l + depth(k) - 1, l)
    assert g1 == IndexCombination(g1_by_filter(k, l))
    for j in list(g1) + list(build_G2(k, l)):
        assert weight(j) == weight(k) + l


def test_F_examples():
    assert build_F(3, 2, 1) == comb_of(((1, 2), 1), ((2, 1), 2))
    assert build_F(3, 3, 1) == comb_of((ones(3), 1))
    assert build_F(4, 2, 2) == comb_of(((3, 1), 1), ((2, 2), 2), ((1, 3), 4))
    with pytest.raises(ValueError):
        build_F(3, 4, 1)
    with pytest.raises(ValueError):
        build_F(4, 2, 3)


def test_H_examples():
    assert build_H(3, 3, 1) == comb_of((ones(3), 1))
    for r in range(1, 6):
        for i in range(1, r + 1):
            assert build_H(r, r, i) == comb_of((ones(r), 1))
    h = build_H(4, 3, 1)
    assert h + phi(h) == comb_of((ones(4), 1))


# --- combination arithmetic and text form ------------------------------------


@given(
    st.lists(st.tuples(indices, st.fractions(max_denominator=9)), max_size=6),
    st.randoms(use_true_random=False),
)
def test_combination_order_independent(terms, rnd):
    shuffled = list(terms)
    rnd.shuffle(shuffled)
    a, b = IndexCombination(terms), IndexCombination(shuffled)
    assert a == b
    assert a.to_text() == b.to_text()
    assert all(c != 0 for c in a.values())
    assert a - b == ZERO
    assert parse_combination(a.to_text()) == a


def test_combination_arithmetic_exact():
    a = comb_of(((1, 2), Fraction(1, 3)), ((3,), 2))
    assert a * Fraction(3) == comb_of(((1, 2), 1), ((3,), 6))
    assert a + (-a) == ZERO
    assert (a - a).is_zero()
    assert list(comb_of(((2, 1, 1), 1), ((5,), 1), ((1, 3), 1))) == [(5,), (1, 3), (2, 1, 1)]
    with pytest.raises(TypeError):
        IndexCombination([((1,), 0.5)])


def test_text_forms():
    assert format_index((1, 2, 2)) == "1,2,2"
    assert parse_index("1,2,2") == (1, 2, 2)
    for bad in ["1,,2", "1, 2", "0,1", "a"]:
        with pytest.raises(ValueError):
            parse_index(bad)
    c = comb_of(((1, 2), Fraction(-3, 4)), ((2,), 1))
    assert c.to_text() == "(2) + -3/4*(1,2)"
    assert ZERO.to_text() == "0"
