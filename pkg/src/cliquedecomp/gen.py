"""Deterministic planted-instance generator.

Instances are built from a known set of weighted cliques: every edge weight
is the exact sum of the weights of the planted cliques containing both
endpoints, so the planted set is a decomposition witness and the instance is
a YES for k = k_true by construction.  An overlap bias steers how eagerly
new cliques reuse already-covered vertices, which controls how large the
twin blocks get (heavy reuse produces few distinct membership patterns and
therefore large blocks, the regime where kernelization shines).

Randomness comes from splitmix64, a public, trivially portable 64-bit
generator: state advances by the odd constant 0x9E3779B97F4A7C15 and each
output is the finalizing mix z ^= z>>30, z *= 0xBF58476D1CE4E5B9, z ^= z>>27,
z *= 0x94D049BB133111EB, z ^= z>>31.  All derived quantities (integer draws,
weighted picks) are defined below in terms of raw 64-bit outputs only, so a
corpus is bit-reproducible from its seed in any implementation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, Sequence

from .instance import InstanceError, WeightedGraph, as_weight

__all__ = [
    "GenSpec",
    "PlantedInstance",
    "SplitMix64",
    "corpus",
    "derive_seed",
    "generate",
]

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream; see the module docstring for the exact algorithm."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in [lo, hi]: lo + next_u64() mod (hi - lo + 1)."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def pick_weighted(self, weights: Sequence[Fraction]) -> int:
        """Index drawn with probability proportional to the given exact weights.

        The draw point is next_u64()/2**64 of the total weight; the first
        index whose cumulative weight exceeds it wins.
        """
        total = sum(weights, Fraction(0))
        if total <= 0:
            raise ValueError("weights must have positive total")
        point = Fraction(self.next_u64(), 1 << 64) * total
        acc = Fraction(0)
        for idx, w in enumerate(weights):
            acc += w
            if point < acc:
                return idx
        return len(weights) - 1


def derive_seed(base_seed: int, *parts: int) -> int:
    """Stable sub-seed: fold each part into a splitmix64 step of the running state."""
    state = base_seed & _MASK64
    for part in parts:
        state = SplitMix64(state ^ ((part * _GAMMA) & _MASK64)).next_u64()
    return state


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one planted instance."""

    n: int
    k_true: int
    size_range: tuple[int, int] = (2, 6)
    weight_range: tuple[int, int] = (1, 5)
    overlap_bias: Fraction = Fraction(1, 2)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "overlap_bias", as_weight(str(self.overlap_bias), context="overlap_bias")
        )
        lo, hi = self.size_range
        wlo, whi = self.weight_range
        if self.k_true < 1:
            raise InstanceError("k_true must be >= 1")
        if lo < 2 or hi < lo:
            raise InstanceError(f"invalid size range {self.size_range}; min size is 2")
        if wlo < 1 or whi < wlo:
            raise InstanceError(f"invalid weight range {self.weight_range}; weights are positive")
        if not 0 <= self.overlap_bias <= 1:
            raise InstanceError("overlap_bias must be in [0, 1]")
        if self.n < hi:
            raise InstanceError(f"n={self.n} is smaller than the maximum clique size {hi}")


@dataclass(frozen=True)
class PlantedInstance:
    """Generated graph together with its planted witness."""

    graph: WeightedGraph
    planted: tuple[tuple[frozenset[int], Fraction], ...]
    k_true: int

    @property
    def covered(self) -> frozenset[int]:
        out: set[int] = set()
        for members, _ in self.planted:
            out.update(members)
        return frozenset(out)

    @property
    def uncovered(self) -> tuple[int, ...]:
        covered = self.covered
        return tuple(v for v in range(self.graph.n) if v not in covered)


def generate(spec: GenSpec) -> PlantedInstance:
    """Build the planted instance for ``spec``; identical specs give identical output."""
    rng = SplitMix64(spec.seed)
    uses = [0] * spec.n
    bias = spec.overlap_bias
    cliques: list[tuple[frozenset[int], Fraction]] = []
    for _ in range(spec.k_true):
        size = rng.randint(spec.size_range[0], spec.size_range[1])
        pool = list(range(spec.n))
        members: list[int] = []
        for _ in range(size):
            weights = [1 + bias * uses[v] for v in pool]
            idx = rng.pick_weighted(weights)
            members.append(pool.pop(idx))
        weight = Fraction(rng.randint(spec.weight_range[0], spec.weight_range[1]))
        for v in members:
            uses[v] += 1
        cliques.append((frozenset(members), weight))

    edge_weight: dict[tuple[int, int], Fraction] = {}
    for members, weight in cliques:
        ordered = sorted(members)
        for a in range(len(ordered)):
            for b in range(a + 1, len(ordered)):
                key = (ordered[a], ordered[b])
                edge_weight[key] = edge_weight.get(key, Fraction(0)) + weight
    edges = [(u, v, w) for (u, v), w in sorted(edge_weight.items())]
    return PlantedInstance(
        graph=WeightedGraph(spec.n, edges), planted=tuple(cliques), k_true=spec.k_true
    )


def corpus(
    base: GenSpec,
    k_values: Sequence[int],
    instances_per_k: int,
    kin_multipliers: Sequence[object],
) -> Iterator[tuple[PlantedInstance, int]]:
    """Instances across planted-k values, each paired with derived input-k values.

    For every planted k and instance index i, the instance is generated from
    seed derive_seed(base.seed, k, i) and emitted once per multiplier with
    k_in = ceil(multiplier * k).  Multipliers are exact rationals, so the
    ceiling has no floating wobble.
    """
    mults = [as_weight(str(m), context="k_in multiplier") for m in kin_multipliers]
    if any(m <= 0 for m in mults):
        raise InstanceError("k_in multipliers must be positive")
    for k in k_values:
        for i in range(instances_per_k):
            spec = replace(base, k_true=k, seed=derive_seed(base.seed, k, i))
            instance = generate(spec)
            for mult in mults:
                scaled = mult * k
                k_in = int(-(-scaled.numerator // scaled.denominator))
                yield instance, k_in
