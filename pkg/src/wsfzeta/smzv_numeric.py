"""Truncated multiple zeta(-star) sums over the reals and symmetric sums built from them.

Truncated sums are accumulated in binary fixed point with ``FRACTION_BITS``
fractional bits (about 48 significant decimal digits) using Python integers,
so the accumulation order is fixed and the result is reproducible bit for bit.
Values are returned as :class:`fractions.Fraction` with a power-of-two
denominator; products of them are exact.

Symmetric values are approximated by evaluating the symmetric combination of
truncated sums at a common cutoff ``M``.  The divergent parts cancel in that
combination, and the remaining truncation error is of order
``log(M)^(r-1) / M``.  Convergence is monitored through the gap between the
values at ``M`` and ``M // 2`` rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate
from typing import Any, Optional

import numpy as np

from .index_algebra import Index, compositions, format_index, reverse, star_expand

FRACTION_BITS = 160
_ONE = 1 << FRACTION_BITS

DEFAULT_M = 10**5
DEFAULT_TOL = 1e-3
DEFAULT_MAX_DEN = 64


@dataclass(frozen=True)
class TruncatedValue:
    index: Index
    M: int
    star: bool
    value: Fraction

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"TruncatedValue(index={self.index}, M={self.M}, star={self.star}, value~{float(self.value)!r})"


@dataclass(frozen=True)
class SymmetricApprox:
    index: Index
    M: int
    star: bool
    value: Fraction
    cauchy_gap: float

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return (
            f"SymmetricApprox(index={self.index}, M={self.M}, star={self.star}, "
            f"value~{float(self.value)!r}, cauchy_gap={self.cauchy_gap!r})"
        )


@lru_cache(maxsize=16)
def _inverse_powers(e: int, M: int) -> tuple[int, ...]:
    # round(2^B / n^e) for n = 0..M, with a zero filler at n = 0
    return (0,) + tuple((_ONE + (n**e >> 1)) // n**e for n in range(1, M + 1))


@lru_cache(maxsize=256)
def _prefix_values(k: Index, M: int, star: bool, cutoffs: tuple[int, ...]) -> tuple[tuple[Fraction, ...], ...]:
    """For every cutoff c, the truncated values at c of k[:0], k[:1], ..., k[:r]."""
    acc = [_ONE] * (M + 1)
    rows = [[Fraction(1)] * len(cutoffs)]
    for e in k:
        w = _inverse_powers(e, M)
        if star:
            term = [(a * b) >> FRACTION_BITS for a, b in zip(acc, w)]
        else:
            term = [0]
            term.extend((a * b) >> FRACTION_BITS for a, b in zip(acc, w[1:]))
        acc = list(accumulate(term))
        rows.append([Fraction(acc[c], _ONE) for c in cutoffs])
    # transpose to cutoff-major
    return tuple(tuple(row[j] for row in rows) for j in range(len(cutoffs)))


def _check_cutoffs(M: int, cutoffs: tuple[int, ...]) -> None:
    if M < 1:
        raise ValueError("cutoff M must be positive")
    if any(not 0 <= c <= M for c in cutoffs):
        raise ValueError("cutoffs must lie in [0, M]")


def truncated_mzv(k: Index, M: int, star: bool = False) -> TruncatedValue:
    """sum over 0 < n_1 < ... < n_r <= M (``<=`` throughout if ``star``) of prod n_j^(-k_j)."""
    k = tuple(k)
    _check_cutoffs(M, (M,))
    if not k:
        return TruncatedValue(k, M, star, Fraction(1))
    return TruncatedValue(k, M, star, _prefix_values(k, M, star, (M,))[0][-1])


def smzv_star_values(k: Index, cutoffs: tuple[int, ...]) -> list[Fraction]:
    """sum_{i=0}^{r} (-1)^(k_{i+1}+...+k_r) z_c(k_1..k_i) z_c(k_r..k_{i+1}) at each cutoff c."""
    k = tuple(k)
    if not k:
        raise ValueError("symmetric sums need a nonempty index")
    cutoffs = tuple(cutoffs)
    M = max(cutoffs)
    _check_cutoffs(M, cutoffs)
    r = len(k)
    fwd = _prefix_values(k, M, False, cutoffs)
    bwd = _prefix_values(reverse(k), M, False, cutoffs)
    signs = [(-1) ** sum(k[i:]) for i in range(r + 1)]
    return [sum((signs[i] * f[i] * b[r - i] for i in range(r + 1)), Fraction(0)) for f, b in zip(fwd, bwd)]


def smzsv_values(k: Index, cutoffs: tuple[int, ...]) -> list[Fraction]:
    """Star-symmetric values: the symmetric sum over every comma/plus contraction of ``k``."""
    total = [Fraction(0)] * len(cutoffs)
    for j, c in star_expand(tuple(k)).items():
        for t, v in enumerate(smzv_star_values(j, cutoffs)):
            total[t] += c * v
    return total


def _approx(k: Index, M: int, star: bool) -> SymmetricApprox:
    half, full = (smzsv_values if star else smzv_star_values)(k, (M // 2, M))
    return SymmetricApprox(tuple(k), M, star, full, abs(float(full - half)))


def smzv_star_approx(k: Index, M: int) -> SymmetricApprox:
    return _approx(k, M, star=False)


def smzsv_approx(k: Index, M: int) -> SymmetricApprox:
    return _approx(k, M, star=True)


def rational_reconstruct(x, max_den: int, tol: float) -> Optional[Fraction]:
    """First continued-fraction convergent p/q of ``x`` with q <= max_den and |x - p/q| <= tol."""
    if max_den < 1:
        raise ValueError("max_den must be positive")
    x = Fraction(x)
    h0, h1 = 1, math.floor(x)
    k0, k1 = 0, 1
    rest = x - h1
    while True:
        if k1 > max_den:
            return None
        if abs(x - Fraction(h1, k1)) <= tol:
            return Fraction(h1, k1)
        if rest == 0:
            return None
        a = math.floor(1 / rest)
        rest = 1 / rest - a
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0


@lru_cache(maxsize=16)
def reference_zeta(s: int, cutoff: int) -> float:
    """zeta(s) from the truncated sum up to ``cutoff`` plus an Euler-Maclaurin tail."""
    if s < 2:
        raise ValueError("zeta(s) diverges for s < 2")
    parts = []
    for lo in range(1, cutoff + 1, 1 << 20):
        n = np.arange(lo, min(lo + (1 << 20), cutoff + 1), dtype=np.float64)
        parts.append(math.fsum(n**-s))
    N = float(cutoff)
    tail = N ** (1 - s) / (s - 1) - N**-s / 2 + s * N ** (-s - 1) / 12 - s * (s + 1) * (s + 2) * N ** (-s - 3) / 720
    return math.fsum(parts) + tail


@dataclass
class SmzvReport:
    k: int
    r: int
    i: int
    star: bool
    M: int
    S: float
    basis: str
    q: Optional[Fraction]
    residual: Optional[float]
    passed: bool
    status: str
    cauchy_gap: float
    q_double: Optional[Fraction] = None

    def to_json(self) -> dict[str, Any]:
        out = {
            "identity": "smzv-wsf",
            "params": {"k": self.k, "r": self.r, "i": self.i, "star": self.star, "M": self.M},
            "S": self.S,
            "basis": self.basis,
            "q": None if self.q is None else f"{self.q.numerator}/{self.q.denominator}",
            "residual": self.residual,
            "pass": self.passed,
            "status": self.status,
            "cauchy_gap": self.cauchy_gap,
        }
        if self.q_double is not None:
            out["q_2M"] = f"{self.q_double.numerator}/{self.q_double.denominator}"
        return out


SUPPORTED_SMZV_WEIGHTS = (1, 2, 3, 4, 5)


def _basis(k: int, M: int) -> tuple[str, Optional[float]]:
    if k in (1, 3):
        return "none", None
    z2 = reference_zeta(2, 100 * M)
    if k == 5:
        return "zeta2*zeta3", z2 * reference_zeta(3, 100 * M)
    return ("zeta2" if k == 2 else "zeta2^2"), z2 ** (k // 2)


def weighted_symmetric_sum(k: int, r: int, i: int, cutoffs: tuple[int, ...], star: bool = False) -> list[Fraction]:
    """sum over compositions of 2^(k_i) times the (star-)symmetric value, at each cutoff."""
    total = [Fraction(0)] * len(cutoffs)
    values = smzsv_values if star else smzv_star_values
    for c in compositions(k, r):
        for t, v in enumerate(values(c, cutoffs)):
            total[t] += 2 ** c[i - 1] * v
    return total


def verify_smzv_weighted_sum(
    k: int,
    r: int,
    i: int,
    M: int = DEFAULT_M,
    max_den: int = DEFAULT_MAX_DEN,
    tol: float = DEFAULT_TOL,
    star: bool = False,
    check_stability: bool = False,
) -> SmzvReport:
    """Check that the weighted symmetric sum vanishes modulo zeta(2) numerically.

    Weight 1 and 3 must give |S| <= tol.  Weight 5 must give S close to a
    small-denominator rational multiple of zeta(2) zeta(3).  Weights 2 and 4
    are compared with powers of zeta(2) and only reported as "consistent",
    since the ideal then contains everything of that weight.
    """
    if not 1 <= i <= r <= k:
        raise ValueError(f"need 1 <= i <= r <= k, got k={k}, r={r}, i={i}")
    if r % 2 == 0:
        raise ValueError(f"r must be odd, got r={r}")
    if k not in SUPPORTED_SMZV_WEIGHTS:
        raise ValueError(f"weight {k} is not supported (only {SUPPORTED_SMZV_WEIGHTS})")
    cutoffs = (M // 2, M, 2 * M) if check_stability else (M // 2, M)
    sums = weighted_symmetric_sum(k, r, i, cutoffs, star)
    S = sums[1]
    gap = abs(float(sums[1] - sums[0]))
    basis, scale = _basis(k, M)
    q = q_double = None
    if scale is None:
        residual = abs(float(S))
        passed = residual <= tol
    else:
        q = rational_reconstruct(float(S) / scale, max_den, tol)
        residual = None if q is None else abs(float(S) - float(q) * scale)
        passed = residual is not None and residual <= tol
        if check_stability:
            q_double = rational_reconstruct(float(sums[2]) / scale, max_den, tol)
            passed = passed and q_double == q
    if not passed:
        status = "failed"
    else:
        status = "consistent" if k % 2 == 0 else "verified"
    return SmzvReport(k, r, i, star, M, float(S), basis, q, residual, passed, status, gap, q_double)


def describe(value: SymmetricApprox | TruncatedValue) -> dict[str, Any]:
    out = {"index": format_index(value.index), "M": value.M, "star": value.star, "value": float(value.value)}
    if isinstance(value, SymmetricApprox):
        out["cauchy_gap"] = value.cauchy_gap
    return out
