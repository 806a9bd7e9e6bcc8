"""Indices, Q-linear combinations of indices, and the operators acting on them.

An index is stored as a plain ``tuple`` of positive ints.  Combinations are
sparse maps from indices to :class:`fractions.Fraction` coefficients and are
immutable once built.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterable, Iterator, Mapping
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from numbers import Rational
from typing import Union

Index = tuple[int, ...]
Coefficient = Union[int, Fraction]


class DimensionError(ValueError):
    """Raised when two sequences that must have equal length do not."""


def make_index(entries: Iterable[int]) -> Index:
    """Validate ``entries`` and return them as an index tuple."""
    k = tuple(int(e) for e in entries)
    for e in k:
        if e < 1:
            raise ValueError(f"index entries must be positive integers, got {k}")
    return k


def _require_nonempty(k: Index, what: str) -> None:
    if not k:
        raise ValueError(f"{what} requires a nonempty index")


def ones(m: int) -> Index:
    """The index ({1}^m)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return (1,) * m


def weight(k: Index) -> int:
    return sum(k)


def depth(k: Index) -> int:
    return len(k)


def reverse(k: Index) -> Index:
    return tuple(reversed(k))


def oplus(k: Index, e: Iterable[int]) -> Index:
    """Componentwise sum of an index and a nonnegative sequence of equal length."""
    e = tuple(e)
    if len(e) != len(k):
        raise DimensionError(f"depth mismatch: {len(k)} vs {len(e)}")
    if any(x < 0 for x in e):
        raise ValueError(f"shift sequence must be nonnegative, got {e}")
    return tuple(a + b for a, b in zip(k, e))


def index_key(k: Index) -> tuple[int, Index]:
    """Sort key giving the canonical order: depth first, then lexicographic."""
    return (len(k), k)


def parse_index(text: str) -> Index:
    """Parse ``"1,2,2"`` into ``(1, 2, 2)``.  ``""`` and ``"()"`` give the empty index."""
    text = text.strip()
    if text in ("", "()"):
        return ()
    if not re.fullmatch(r"[0-9]+(,[0-9]+)*", text):
        raise ValueError(f"malformed index string {text!r}")
    return make_index(int(t) for t in text.split(","))


def format_index(k: Index) -> str:
    return ",".join(str(e) for e in k)


# ---------------------------------------------------------------------------
# enumeration


def compositions(k: int, r: int) -> list[Index]:
    """All compositions of ``k`` into exactly ``r`` positive parts, lexicographically."""
    if r < 1 or r > k:
        raise ValueError(f"need 1 <= r <= k, got k={k}, r={r}")
    out = []
    for cuts in combinations(range(1, k), r - 1):
        bounds = (0,) + cuts + (k,)
        out.append(tuple(b - a for a, b in zip(bounds, bounds[1:])))
    return out


def all_compositions(n: int) -> list[Index]:
    """Every composition of ``n`` (any number of parts), in canonical order."""
    if n < 1:
        raise ValueError("n must be positive")
    return [c for r in range(1, n + 1) for c in compositions(n, r)]


def weak_compositions(l: int, length: int) -> list[tuple[int, ...]]:
    """Nonnegative sequences of the given length summing to ``l`` (stars and bars)."""
    if l < 0 or length < 0:
        raise ValueError("weight and length must be nonnegative")
    if length == 0:
        return [()] if l == 0 else []
    out = []
    for bars in combinations(range(l + length - 1), length - 1):
        bounds = (-1,) + bars + (l + length - 1,)
        out.append(tuple(b - a - 1 for a, b in zip(bounds, bounds[1:])))
    return out


def indices_up_to(max_weight: int) -> Iterator[Index]:
    """Every nonempty index of weight at most ``max_weight``."""
    for w in range(1, max_weight + 1):
        yield from all_compositions(w)


# ---------------------------------------------------------------------------
# linear combinations


class IndexCombination(Mapping):
    """A finite Q-linear combination of indices.

    Behaves as a read-only mapping ``Index -> Fraction`` whose iteration order
    is canonical.  Zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[Index, Coefficient], Iterable[tuple[Index, Coefficient]], None] = None):
        acc: dict[Index, Fraction] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for k, c in items:
                if not isinstance(c, Rational):
                    raise TypeError(f"coefficients must be exact rationals, got {c!r}")
                acc[k] = acc.get(k, Fraction(0)) + c
        self._terms = {k: Fraction(acc[k]) for k in sorted(acc, key=index_key) if acc[k] != 0}
        self._hash = None

    @classmethod
    def single(cls, k: Index, c: Coefficient = 1) -> IndexCombination:
        return cls([(k, c)])

    @classmethod
    def from_indices(cls, indices: Iterable[Index]) -> IndexCombination:
        """Sum of the given indices, each with coefficient 1; repeats accumulate."""
        return cls((k, 1) for k in indices)

    # Mapping protocol
    def __getitem__(self, k: Index) -> Fraction:
        return self._terms[k]

    def __iter__(self) -> Iterator[Index]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, k: Index) -> Fraction:
        return self._terms.get(k, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, IndexCombination):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # arithmetic
    def __add__(self, other: IndexCombination) -> IndexCombination:
        if not isinstance(other, IndexCombination):
            return NotImplemented
        return IndexCombination(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> IndexCombination:
        return IndexCombination({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: IndexCombination) -> IndexCombination:
        if not isinstance(other, IndexCombination):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar: Coefficient) -> IndexCombination:
        if not isinstance(scalar, Rational):
            return NotImplemented
        return IndexCombination({k: c * scalar for k, c in self._terms.items()})

    __rmul__ = __mul__

    def linear_map(self, f: Callable[[Index], IndexCombination]) -> IndexCombination:
        """Apply ``f`` to every index and extend Q-linearly."""
        out: dict[Index, Fraction] = {}
        for k, c in self._terms.items():
            for j, d in f(k).items():
                out[j] = out.get(j, Fraction(0)) + c * d
        return IndexCombination(out)

    def total_multiplicity(self) -> Fraction:
        """Sum of all coefficients."""
        return sum(self._terms.values(), Fraction(0))

    # text form
    def to_text(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(_format_term(k, c) for k, c in self._terms.items())

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"IndexCombination({self.to_text()!r})"


def _format_term(k: Index, c: Fraction) -> str:
    body = "(" + ",".join(str(e) for e in k) + ")"
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}*{body}"


_TERM_RE = re.compile(r"^(-?)(?:(\d+(?:/\d+)?)\*)?\(([0-9,]*)\)$")


def parse_combination(text: str) -> IndexCombination:
    """Inverse of :meth:`IndexCombination.to_text`."""
    text = text.strip()
    if text == "0":
        return IndexCombination()
    terms = []
    for part in text.split(" + "):
        m = _TERM_RE.match(part.strip())
        if m is None:
            raise ValueError(f"malformed combination term {part!r}")
        sign, coeff, body = m.groups()
        c = Fraction(coeff) if coeff else Fraction(1)
        if sign:
            c = -c
        terms.append((parse_index(body), c))
    return IndexCombination(terms)


ZERO = IndexCombination()


# ---------------------------------------------------------------------------
# operators


def hoffman_dual(k: Index) -> Index:
    """Hoffman's dual index.

    Spell ``k`` as a string of 1s, joined by ``+`` inside a block and by ``,``
    between blocks, swap the two separators, and read the result back.
    """
    _require_nonempty(k, "hoffman_dual")
    tokens = ",".join("+".join("1" * e) for e in make_index(k))
    swapped = tokens.translate(str.maketrans({",": "+", "+": ","}))
    return tuple(block.count("1") for block in swapped.split(","))


@lru_cache(maxsize=None)
def _block_expansions(n: int) -> tuple[Index, ...]:
    # 1 [] 1 [] ... [] 1 with n ones: all compositions of n
    return tuple(all_compositions(n))


@lru_cache(maxsize=1 << 16)
def _phi_terms(k: Index) -> tuple[Index, ...]:
    return tuple(sum(parts, ()) for parts in product(*(_block_expansions(e) for e in k)))


def phi(k: Union[Index, IndexCombination]) -> IndexCombination:
    """The signed comma/plus expansion of every block; linear on combinations."""
    if isinstance(k, IndexCombination):
        return k.linear_map(phi)
    _require_nonempty(k, "phi")
    k = make_index(k)
    sign = -1 if len(k) % 2 else 1
    return IndexCombination((t, sign) for t in _phi_terms(k))


def star_expand(k: Index) -> IndexCombination:
    """Sum over all ways of replacing each separator of ``k`` by a comma or a plus."""
    _require_nonempty(k, "star_expand")
    k = make_index(k)
    terms = []
    for plus in product((False, True), repeat=len(k) - 1):
        out = [k[0]]
        for merge, e in zip(plus, k[1:]):
            if merge:
                out[-1] += e
            else:
                out.append(e)
        terms.append((tuple(out), 1))
    return IndexCombination(terms)


def build_F(k: int, r: int, i: int) -> IndexCombination:
    """Sum over compositions of k into r parts, weighted by 2^(k_i - 1)."""
    if not 1 <= i <= r <= k:
        raise ValueError(f"need 1 <= i <= r <= k, got k={k}, r={r}, i={i}")
    return IndexCombination((c, 2 ** (c[i - 1] - 1)) for c in compositions(k, r))


def build_G1(k: Index, l: int) -> IndexCombination:
    _require_nonempty(k, "build_G1")
    return IndexCombination.from_indices(oplus(k, e) for e in weak_compositions(l, len(k)))


def build_G2(k: Index, l: int) -> IndexCombination:
    _require_nonempty(k, "build_G2")
    kd = hoffman_dual(k)
    return IndexCombination.from_indices(hoffman_dual(oplus(kd, e)) for e in weak_compositions(l, len(kd)))


def build_G(k: Index, l: int) -> IndexCombination:
    return build_G1(k, l) - build_G2(k, l)


def spike(r: int, i: int, height: int) -> Index:
    """The index ({1}^(i-1), height, {1}^(r-i))."""
    return ones(i - 1) + (height,) + ones(r - i)


def g_family(k: int, r: int, i: int, g: Callable[[Index, int], IndexCombination]) -> IndexCombination:
    """sum_{l=1}^{k-r-1} 2^(l-1) g(spike(l+1), k-r-l) + g(({1}^r), k-r).

    With ``g`` one of the G-operators this is the subtracted part of H, and of
    the two auxiliary lemmas.
    """
    if not 1 <= i <= r <= k:
        raise ValueError(f"need 1 <= i <= r <= k, got k={k}, r={r}, i={i}")
    total = g(ones(r), k - r)
    for l in range(1, k - r):
        total = total + 2 ** (l - 1) * g(spike(r, i, l + 1), k - r - l)
    return total


def build_H(k: int, r: int, i: int) -> IndexCombination:
    return build_F(k, r, i) - g_family(k, r, i, build_G)
