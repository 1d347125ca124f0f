"""Clique-decomposition solutions: binary membership rows plus clique weights.

A solution to the matrix problem is an n-by-k binary membership matrix B
(stored as one k-bit mask per row) together with a nonnegative weight per
clique column.  Column q with weight gamma[q] represents one clique whose
members are the rows with bit q set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["Decomposition", "popcount", "subset_sum_fn"]


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def subset_sum_fn(gamma: Sequence[Fraction]):
    """Memoized mask -> sum of gamma over the mask's set bits.

    Masked down to the nonzero entries of gamma first, so lookups collapse
    across the (typically many) masks that differ only in zero-weight bits.
    """
    nonzero = [(1 << q, g) for q, g in enumerate(gamma) if g != 0]
    nzmask = 0
    for bit, _ in nonzero:
        nzmask |= bit
    cache: dict[int, Fraction] = {0: Fraction(0)}

    def subset_sum(mask: int) -> Fraction:
        mask &= nzmask
        hit = cache.get(mask)
        if hit is None:
            hit = sum((g for bit, g in nonzero if mask & bit), Fraction(0))
            cache[mask] = hit
        return hit

    return subset_sum


@dataclass(frozen=True)
class Decomposition:
    """Membership bitmask per vertex plus one weight per clique column."""

    B: tuple[int, ...]
    gamma: tuple[Fraction, ...]

    def __post_init__(self):
        k = len(self.gamma)
        if any(g < 0 for g in self.gamma):
            raise ValueError("clique weights must be nonnegative")
        if any(row < 0 or row >> k for row in self.B):
            raise ValueError(f"membership mask out of range for k={k}")

    @property
    def n(self) -> int:
        return len(self.B)

    @property
    def k(self) -> int:
        return len(self.gamma)

    def column_members(self, q: int) -> tuple[int, ...]:
        bit = 1 << q
        return tuple(i for i, row in enumerate(self.B) if row & bit)

    @property
    def cliques(self) -> tuple[tuple[frozenset[int], Fraction], ...]:
        """Cliques of the solution: columns with at least one member and positive weight."""
        out = []
        for q, weight in enumerate(self.gamma):
            if weight <= 0:
                continue
            members = self.column_members(q)
            if members:
                out.append((frozenset(members), weight))
        return tuple(out)

    def permuted_columns(self, perm: Sequence[int]) -> "Decomposition":
        """Solution with clique columns relabeled: new column p is old perm[p]."""
        if sorted(perm) != list(range(self.k)):
            raise ValueError("column permutation must cover all columns exactly once")
        rows = []
        for row in self.B:
            new = 0
            for p, old in enumerate(perm):
                if row & (1 << old):
                    new |= 1 << p
            rows.append(new)
        return Decomposition(B=tuple(rows), gamma=tuple(self.gamma[old] for old in perm))
