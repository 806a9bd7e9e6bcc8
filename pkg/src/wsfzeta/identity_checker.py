"""Exact symbolic checks of the combinatorial lemmas behind the weighted sum formula.

Every check builds both sides as :class:`IndexCombination` objects with
rational coefficients and reports the full difference, so a failure comes
with its counterexample attached.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any

from .index_algebra import (
    ZERO,
    Index,
    IndexCombination,
    build_F,
    build_G1,
    build_G2,
    build_H,
    compositions,
    g_family,
    hoffman_dual,
    indices_up_to,
    ones,
    oplus,
    phi,
    spike,
    weak_compositions,
)


class LemmaId(str, enum.Enum):
    LEMMA1 = "Lemma1"
    LEMMA2 = "Lemma2"
    KEY_LEMMA = "KeyLemma"
    BINOMIAL_IDENTITY = "BinomialIdentity"
    MULTIPLICITY_A = "MultiplicityA"
    MULTIPLICITY_B = "MultiplicityB"
    PHI_INVOLUTION = "PhiInvolution"
    DUAL_INVOLUTION = "DualInvolution"


@dataclass(frozen=True)
class LemmaCheckResult:
    lemma: LemmaId
    params: tuple[int, ...]
    passed: bool
    residual: IndexCombination

    def __post_init__(self):
        if self.passed != self.residual.is_zero():
            raise ValueError("pass flag must agree with an empty residual")

    def to_json(self) -> dict[str, Any]:
        return {
            "lemma": self.lemma.value,
            "params": list(self.params),
            "pass": self.passed,
            "residual": self.residual.to_text(),
        }


def _result(lemma: LemmaId, params: tuple[int, ...], lhs: IndexCombination, rhs: IndexCombination) -> LemmaCheckResult:
    residual = lhs - rhs
    return LemmaCheckResult(lemma, params, residual.is_zero(), residual)


def _check_kri(k: int, r: int, i: int, *, odd_r: bool) -> None:
    if not 1 <= i <= r <= k:
        raise ValueError(f"need 1 <= i <= r <= k, got k={k}, r={r}, i={i}")
    if odd_r and r % 2 == 0:
        raise ValueError(f"r must be odd, got r={r}")


def check_lemma1(k: int, r: int, i: int) -> LemmaCheckResult:
    """F(k,r,i) minus the G1-family equals 2^(k-r-1) times the spike index.

    At ``k == r`` the closed form has exponent -1 and does not apply; there the
    boundary identity F(r,r,i) = ({1}^r) is checked instead.
    """
    _check_kri(k, r, i, odd_r=False)
    if k == r:
        return _result(LemmaId.LEMMA1, (k, r, i), build_F(k, r, i), IndexCombination.single(ones(r)))
    lhs = build_F(k, r, i) - g_family(k, r, i, build_G1)
    rhs = IndexCombination.single(spike(r, i, k - r + 1), 2 ** (k - r - 1))
    return _result(LemmaId.LEMMA1, (k, r, i), lhs, rhs)


def multiplicity_oracle_A(k: int, r: int, i: int, a: Index) -> tuple[int, int]:
    """(coefficient of ``a`` in the G1-family, closed-form count)."""
    _check_kri(k, r, i, odd_r=False)
    if k == r:
        raise ValueError("the closed-form count needs k > r")
    if len(a) != r or sum(a) != k or min(a) < 1:
        raise ValueError(f"{a} is not a composition of {k} into {r} parts")
    # literal term-by-term expansion, no combination arithmetic
    count = sum(1 for e in weak_compositions(k - r, r) if oplus(ones(r), e) == a)
    for l in range(1, k - r):
        base = spike(r, i, l + 1)
        count += 2 ** (l - 1) * sum(1 for e in weak_compositions(k - r - l, r) if oplus(base, e) == a)
    ai = a[i - 1]
    closed = 2 ** (ai - 1) if ai <= k - r else 2 ** (k - r - 1)
    return count, closed


def _lemma2_B(k: int, r: int, i: int) -> IndexCombination:
    return g_family(k, r, i, build_G2)


@lru_cache(maxsize=64)
def _lemma2_lhs(k: int, r: int, i: int) -> IndexCombination:
    B = _lemma2_B(k, r, i)
    return B + phi(B)


def check_lemma2(k: int, r: int, i: int) -> LemmaCheckResult:
    """B + phi(B) against -2^(k-r-1) (s + phi(s)) [+ ({1}^k) for even k], s the spike."""
    _check_kri(k, r, i, odd_r=True)
    lhs = _lemma2_lhs(k, r, i)
    s = IndexCombination.single(spike(r, i, k - r + 1))
    rhs = -Fraction(2) ** (k - r - 1) * (s + phi(s))
    if k % 2 == 0:
        rhs = rhs + IndexCombination.single(ones(k))
    return _result(LemmaId.LEMMA2, (k, r, i), lhs, rhs)


def multiplicity_oracle_B(k: int, r: int, i: int, a: Index) -> tuple[int, int]:
    """(coefficient of ``a`` in B + phi(B), expected count).

    ``a`` is either ({1}^k) or ({1}^(i-1), a_1..a_d, {1}^(r-i)) with
    a_1 + ... + a_d = k - r + 1 and 2 <= d <= k - r.
    """
    _check_kri(k, r, i, odd_r=True)
    if k == r:
        raise ValueError("the expected counts need k > r")
    a = tuple(a)
    if a == ones(k):
        expected = 2 ** (k - r - 1) + (1 if k % 2 == 0 else 0)
    else:
        d = len(a) - r + 1
        head, middle, tail = a[: i - 1], a[i - 1 : i - 1 + d], a[i - 1 + d :]
        if (
            not 2 <= d <= k - r
            or head != ones(i - 1)
            or tail != ones(r - i)
            or sum(middle) != k - r + 1
            or min(middle) < 1
        ):
            raise ValueError(f"{a} does not have the admissible shape for (k,r,i)=({k},{r},{i})")
        expected = 2 ** (k - r - 1)
    return int(_lemma2_lhs(k, r, i).coefficient(a)), expected


def check_binomial_identity(d: int) -> LemmaCheckResult:
    """sum_{l=0}^{d-2} (-2)^l C(d-1, l) == (-1)^(d-1) - (-2)^(d-1)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    lhs = sum((-2) ** l * comb(d - 1, l) for l in range(d - 1))
    rhs = (-1) ** (d - 1) - (-2) ** (d - 1)
    # residual is carried as a multiple of the empty index
    residual = IndexCombination.single((), lhs - rhs)
    return LemmaCheckResult(LemmaId.BINOMIAL_IDENTITY, (d,), residual.is_zero(), residual)


def key_lemma_expression(k: int, r: int, i: int) -> IndexCombination:
    """H(k,r,i) + phi(H(k,r,i)) without any parity restriction on ``r``."""
    _check_kri(k, r, i, odd_r=False)
    H = build_H(k, r, i)
    return H + phi(H)


def key_lemma_target(k: int) -> IndexCombination:
    return IndexCombination.single(ones(k)) if k % 2 == 0 else ZERO


def check_key_lemma(k: int, r: int, i: int) -> LemmaCheckResult:
    _check_kri(k, r, i, odd_r=True)
    return _result(LemmaId.KEY_LEMMA, (k, r, i), key_lemma_expression(k, r, i), key_lemma_target(k))


def check_phi_involution(max_weight: int) -> LemmaCheckResult:
    residual = ZERO
    for k in indices_up_to(max_weight):
        diff = phi(phi(k)) - IndexCombination.single(k)
        if not diff.is_zero():
            residual = residual + diff
    return LemmaCheckResult(LemmaId.PHI_INVOLUTION, (max_weight,), residual.is_zero(), residual)


def check_dual_involution(max_weight: int) -> LemmaCheckResult:
    residual = ZERO
    for k in indices_up_to(max_weight):
        kk = hoffman_dual(hoffman_dual(k))
        if kk != k:
            residual = residual + IndexCombination([(kk, 1), (k, -1)])
    return LemmaCheckResult(LemmaId.DUAL_INVOLUTION, (max_weight,), residual.is_zero(), residual)


def lemma_grid(max_k: int, *, odd_r: bool, strict: bool = False) -> list[tuple[int, int, int]]:
    """All (k, r, i) with 1 <= i <= r <= k <= max_k, optionally r odd and/or k > r."""
    return [
        (k, r, i)
        for k in range(1, max_k + 1)
        for r in range(1, k + 1)
        if not (odd_r and r % 2 == 0) and not (strict and r == k)
        for i in range(1, r + 1)
    ]


def admissible_B_targets(k: int, r: int, i: int) -> list[Index]:
    """Every target index for which :func:`multiplicity_oracle_B` states a count."""
    if k == r:
        return []
    out = [ones(k)]
    for d in range(2, k - r + 1):
        for middle in compositions(k - r + 1, d):
            out.append(ones(i - 1) + middle + ones(r - i))
    return out
