"""Exact index combinatorics and numeric checks for the weighted sum formula of
finite and symmetric multiple zeta(-star) values."""

from .index_algebra import (
    Index,
    IndexCombination,
    build_F,
    build_G,
    build_G1,
    build_G2,
    build_H,
    compositions,
    hoffman_dual,
    parse_combination,
    parse_index,
    phi,
    star_expand,
)

__version__ = "0.1.0"
