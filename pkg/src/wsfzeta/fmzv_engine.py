"""Finite multiple zeta(-star) values modulo p and prime sweeps of their identities.

The per-prime component of a finite multiple zeta value is the multiple
harmonic sum

    sum_{0 < n_1 < ... < n_r < p} 1 / (n_1^k_1 ... n_r^k_r)  (mod p),

computed here by a prefix-sum recurrence over ``n``, one depth at a time,
vectorised with numpy.  Star values use ``<=`` instead of ``<``.

Identities are represented as sums of products of such values (see
:class:`ProductSum`), which covers linear relations as well as the antipode
relation.  Sweeps evaluate an identity at every prime of a range, optionally
in a process pool, and always report results sorted by prime.
"""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import isqrt
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .index_algebra import (
    Index,
    IndexCombination,
    build_G,
    compositions,
    format_index,
    parse_index,
    phi,
    reverse,
    weight,
)

log = logging.getLogger(__name__)

# p < 2**31 keeps every product and every prefix sum inside int64
MAX_MODULUS = 2**31 - 1
MAX_SYMMETRIC_DEPTH = 8


class ModulusMismatchError(ValueError):
    pass


class BadPrimeError(ValueError):
    pass


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_in(lo: int, hi: int) -> list[int]:
    """All primes in ``[lo, hi]``, ascending."""
    if lo < 2 or hi < lo:
        raise ValueError(f"need 2 <= lo <= hi, got lo={lo}, hi={hi}")
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, isqrt(hi) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(q) for q in np.flatnonzero(sieve) if q >= lo]


@dataclass(frozen=True)
class PrimeFieldValue:
    modulus: int
    residue: int

    def __post_init__(self):
        if not is_prime(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not prime")
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, PrimeFieldValue):
            if other.modulus != self.modulus:
                raise ModulusMismatchError(f"cannot combine residues mod {self.modulus} and mod {other.modulus}")
            return other.residue
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldValue(self.modulus, (self.residue + o) % self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldValue(self.modulus, (self.residue - o) % self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldValue(self.modulus, (o - self.residue) % self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else PrimeFieldValue(self.modulus, self.residue * o % self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldValue(self.modulus, -self.residue % self.modulus)

    def __int__(self):
        return self.residue

    def is_zero(self) -> bool:
        return self.residue == 0


# ---------------------------------------------------------------------------
# kernels


def inverse_table(p: int) -> list[int]:
    """``t`` with ``n * t[n-1] == 1 (mod p)`` for ``1 <= n < p``, in O(p)."""
    return [int(x) for x in _inverse_array(p)[1:]]


@lru_cache(maxsize=64)
def _inverse_array(p: int) -> np.ndarray:
    # inv[n] for 0 <= n < p, inv[0] = 0 as a harmless filler
    if not 2 <= p <= MAX_MODULUS or not is_prime(p):
        raise ValueError(f"p must be a prime below 2**31, got {p}")
    inv = [0] * p
    inv[1] = 1
    for n in range(2, p):
        inv[n] = (p - p // n) * inv[p % n] % p
    return np.array(inv, dtype=np.int64)


class _PowerColumns:
    """Columns n -> n^(-e) mod p, built incrementally in e and kept per prime."""

    def __init__(self, p: int):
        self.p = p
        self.cols = {1: _inverse_array(p)}

    def __getitem__(self, e: int) -> np.ndarray:
        if e not in self.cols:
            top = max(self.cols)
            if e < top:
                self.cols[e] = _pow_column(self.p, e)
            else:
                col = self.cols[top]
                for j in range(top + 1, e + 1):
                    col = col * self.cols[1] % self.p
                    self.cols[j] = col
        return self.cols[e]


def _pow_column(p: int, e: int) -> np.ndarray:
    """n^(-e) mod p by modular exponentiation of each precomputed inverse."""
    inv = _inverse_array(p)
    return np.array([pow(int(x), e, p) for x in inv], dtype=np.int64)


def _step(prev: np.ndarray, col: np.ndarray, p: int, star: bool) -> np.ndarray:
    """One depth of the recurrence: prefix sums of prev(n or n-1) * n^(-k_j)."""
    term = np.empty_like(prev)
    if star:
        term[:] = prev * col % p
    else:
        term[0] = 0
        term[1:] = prev[:-1] * col[1:] % p
    return np.cumsum(term) % p


def _harmonic_sum(k: Index, p: int, star: bool, cols: Optional[_PowerColumns] = None) -> int:
    if not k:
        return 1 % p
    cols = cols or _PowerColumns(p)
    acc = np.ones(p, dtype=np.int64)
    for e in k:
        acc = _step(acc, cols[e], p, star)
    return int(acc[-1])


def fmzv_mod_p(k: Index, p: int) -> PrimeFieldValue:
    """sum over 0 < n_1 < ... < n_r < p of prod n_j^(-k_j), mod p."""
    return PrimeFieldValue(p, _harmonic_sum(tuple(k), p, star=False))


def fmzsv_mod_p(k: Index, p: int) -> PrimeFieldValue:
    """Star variant, 0 < n_1 <= ... <= n_r < p."""
    return PrimeFieldValue(p, _harmonic_sum(tuple(k), p, star=True))


def fmzv_mod_p_pow(k: Index, p: int, star: bool = False) -> PrimeFieldValue:
    """Same value as :func:`fmzv_mod_p` but with every power column from ``pow``."""
    if not k:
        return PrimeFieldValue(p, 1)
    acc = np.ones(p, dtype=np.int64)
    for e in k:
        acc = _step(acc, _pow_column(p, e), p, star)
    return PrimeFieldValue(p, int(acc[-1]))


def harmonic_sums_mod_p(indices: Iterable[Index], p: int, star: bool) -> dict[Index, int]:
    """Residues of many indices at one prime, sharing work between common prefixes.

    The indices are arranged in a prefix tree and walked depth first, so each
    recurrence column is computed once per distinct prefix.
    """
    wanted = set(map(tuple, indices))
    out: dict[Index, int] = {}
    if () in wanted:
        out[()] = 1 % p
    trie: dict = {}
    for k in wanted:
        node = trie
        for e in k:
            node = node.setdefault(e, {})
    cols = _PowerColumns(p)

    def walk(node: dict, prefix: Index, acc: np.ndarray) -> None:
        for e in sorted(node):
            nxt = _step(acc, cols[e], p, star)
            idx = prefix + (e,)
            if idx in wanted:
                out[idx] = int(nxt[-1])
            walk(node[e], idx, nxt)

    walk(trie, (), np.ones(p, dtype=np.int64))
    return out


def _coefficient_mod_p(c: Fraction, p: int) -> int:
    if c.denominator % p == 0:
        raise BadPrimeError(f"p={p} divides the denominator of coefficient {c}")
    return c.numerator * pow(c.denominator, -1, p) % p


def eval_combination_mod_p(c: IndexCombination, p: int, star: bool = False) -> PrimeFieldValue:
    """Evaluate a Q-linear combination of (star) values at ``p``."""
    coeffs = {k: _coefficient_mod_p(a, p) for k, a in c.items()}
    values = harmonic_sums_mod_p(coeffs, p, star)
    return PrimeFieldValue(p, sum(coeffs[k] * values[k] for k in coeffs) % p)


# ---------------------------------------------------------------------------
# identities as sums of products


Factor = tuple[Index, bool]  # (index, star)


@dataclass(frozen=True)
class ProductSum:
    """sum_t coefficient_t * prod_{(k, star) in factors_t} zeta^(star)(k)."""

    terms: tuple[tuple[Fraction, tuple[Factor, ...]], ...]

    @classmethod
    def linear(cls, c: IndexCombination, star: bool = False) -> ProductSum:
        return cls(tuple((a, ((k, star),)) for k, a in c.items()))

    def factors(self) -> set[Factor]:
        return {f for _, fs in self.terms for f in fs}

    def evaluate(self, p: int, values: dict[Factor, int]) -> int:
        total = 0
        for a, fs in self.terms:
            t = _coefficient_mod_p(a, p)
            for f in fs:
                t = t * values[f] % p
            total += t
        return total % p


def values_at_prime(factors: Iterable[Factor], p: int) -> dict[Factor, int]:
    """Residues of every (index, star) pair at ``p``."""
    factors = list(factors)
    out: dict[Factor, int] = {}
    for star in (False, True):
        ks = [k for k, s in factors if s == star]
        if ks:
            for k, v in harmonic_sums_mod_p(ks, p, star).items():
                out[(k, star)] = v
    return out


class ValueCache:
    """Append-only JSON-lines store of computed residues.

    One record per line: ``{"p": 7, "index": "1,2", "star": false, "residue": 3}``.
    """

    FILENAME = "fmzv_values.jsonl"

    def __init__(self, directory):
        self.path = Path(directory) / self.FILENAME
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._data: dict[tuple[int, Index, bool], int] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._data[(rec["p"], parse_index(rec["index"]), rec["star"])] = rec["residue"]

    def __len__(self) -> int:
        return len(self._data)

    def get(self, p: int, k: Index, star: bool) -> Optional[int]:
        return self._data.get((p, tuple(k), star))

    def put_many(self, p: int, values: dict[Factor, int]) -> None:
        new = [(k, s, v) for (k, s), v in sorted(values.items()) if (p, k, s) not in self._data]
        if not new:
            return
        with self.path.open("a") as fh:
            for k, s, v in new:
                self._data[(p, k, s)] = v
                fh.write(json.dumps({"p": p, "index": format_index(k), "star": s, "residue": v}) + "\n")


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class PrimeResult:
    p: int
    residue: int
    asserted: bool

    @property
    def passed(self) -> bool:
        return self.residue == 0


@dataclass
class PrimeSweepReport:
    """Residues of one identity over a list of primes.

    Primes ``p <= threshold`` are recorded but do not count towards
    :attr:`all_pass`; the identities hold in the ring of residues modulo all
    but finitely many primes, and small primes are the known exceptions.
    """

    identity: str
    params: dict[str, Any]
    threshold: int
    results: list[PrimeResult] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.results if r.asserted)

    @property
    def first_failure(self) -> Optional[int]:
        return next((r.p for r in self.results if r.asserted and not r.passed), None)

    @property
    def exempt_failures(self) -> list[int]:
        return [r.p for r in self.results if not r.asserted and not r.passed]

    def to_json(self) -> dict[str, Any]:
        ps = [r.p for r in self.results]
        return {
            "identity": self.identity,
            "params": self.params,
            "primes": {"lo": ps[0] if ps else None, "hi": ps[-1] if ps else None},
            "results": [{"p": r.p, "residue": r.residue, "pass": r.passed} for r in self.results],
            "summary": {
                "all_pass": self.all_pass,
                "first_failure": self.first_failure,
                "threshold": self.threshold,
                "exempt_failures": self.exempt_failures,
            },
        }


def assertion_threshold(w: int) -> int:
    """Largest prime size exempt from assertion for an identity of weight ``w``.

    At p = w + 1 the depth-one sums of weight w are -1, not 0, because
    p - 1 divides the exponent; so primes up to w + 1 are only recorded.
    """
    return w + 1


def _residue_task(args) -> tuple[int, int, dict[Factor, int]]:
    identity, p, known = args
    needed = [f for f in identity.factors() if f not in known]
    values = dict(known)
    values.update(values_at_prime(needed, p))
    fresh = {f: values[f] for f in needed}
    return p, identity.evaluate(p, values), fresh


def run_sweep(
    name: str,
    params: dict[str, Any],
    identity: ProductSum,
    w: int,
    primes: Iterable[int],
    workers: int = 1,
    cache: Optional[ValueCache] = None,
) -> PrimeSweepReport:
    """Evaluate ``identity`` at each prime and collect a report sorted by prime."""
    primes = sorted(set(primes))
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    factors = sorted(identity.factors())
    tasks = []
    for p in primes:
        known: dict[Factor, int] = {}
        if cache is not None:
            for k, s in factors:
                v = cache.get(p, k, s)
                if v is not None:
                    known[(k, s)] = v
        tasks.append((identity, p, known))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_residue_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outcomes = [_residue_task(t) for t in tasks]
    threshold = assertion_threshold(w)
    report = PrimeSweepReport(name, params, threshold)
    for p, residue, fresh in sorted(outcomes, key=lambda o: o[0]):
        if cache is not None:
            cache.put_many(p, fresh)
        report.results.append(PrimeResult(p, residue, asserted=p > threshold))
        if residue and p > threshold:
            log.warning("%s %s fails at p=%d (residue %d)", name, params, p, residue)
    return report


def _index_param(k: Index) -> str:
    return format_index(k)


def phi_duality_identity(k: Index) -> ProductSum:
    k = tuple(k)
    return ProductSum.linear(IndexCombination.single(k) - phi(k))


def verify_phi_duality(k: Index, primes: Iterable[int], **kw) -> PrimeSweepReport:
    """zeta(k) - zeta(phi(k)) at each prime."""
    k = tuple(k)
    return run_sweep("phi-duality", {"index": _index_param(k)}, phi_duality_identity(k), weight(k), primes, **kw)


def verify_oyama(k: Index, l: int, primes: Iterable[int], **kw) -> PrimeSweepReport:
    """zeta(G(k, l)) at each prime."""
    k = tuple(k)
    identity = ProductSum.linear(build_G(k, l))
    return run_sweep("oyama", {"index": _index_param(k), "l": l}, identity, weight(k) + l, primes, **kw)


def antipode_identity(k: Index) -> ProductSum:
    k = tuple(k)
    if not k:
        raise ValueError("antipode relation needs a nonempty index")
    terms = []
    for l in range(len(k) + 1):
        terms.append((Fraction((-1) ** l), ((k[:l], True), (reverse(k[l:]), False))))
    return ProductSum(tuple(terms))


def verify_antipode(k: Index, primes: Iterable[int], **kw) -> PrimeSweepReport:
    """sum_l (-1)^l zeta*(k_1..k_l) zeta(k_r..k_{l+1}) at each prime."""
    k = tuple(k)
    return run_sweep("antipode", {"index": _index_param(k)}, antipode_identity(k), weight(k), primes, **kw)


def symmetric_sum_identity(k: Index, star: bool) -> ProductSum:
    k = tuple(k)
    if not k:
        raise ValueError("symmetric sum needs a nonempty index")
    if len(k) > MAX_SYMMETRIC_DEPTH:
        raise ValueError(f"depth {len(k)} exceeds {MAX_SYMMETRIC_DEPTH} for the symmetric sum")
    # every permutation counted, repeated entries included
    return ProductSum.linear(IndexCombination.from_indices(permutations(k)), star)


def verify_symmetric_sum(k: Index, primes: Iterable[int], star: bool = False, **kw) -> PrimeSweepReport:
    k = tuple(k)
    identity = symmetric_sum_identity(k, star)
    return run_sweep("symmetric-sum", {"index": _index_param(k), "star": star}, identity, weight(k), primes, **kw)


def weighted_sum_combination(k: int, r: int, i: int) -> IndexCombination:
    """sum over compositions of k into r parts of 2^(k_i) (k_1, ..., k_r)."""
    if not 1 <= i <= r <= k:
        raise ValueError(f"need 1 <= i <= r <= k, got k={k}, r={r}, i={i}")
    if r % 2 == 0:
        raise ValueError(f"r must be odd, got r={r}")
    return IndexCombination((c, 2 ** c[i - 1]) for c in compositions(k, r))


def verify_weighted_sum(k: int, r: int, i: int, primes: Iterable[int], star: bool = False, **kw) -> PrimeSweepReport:
    identity = ProductSum.linear(weighted_sum_combination(k, r, i), star)
    params = {"k": k, "r": r, "i": i, "star": star}
    return run_sweep("fmzv-wsf", params, identity, k, primes, **kw)


def default_workers() -> int:
    return os.cpu_count() or 1
