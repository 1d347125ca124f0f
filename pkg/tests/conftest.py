"""Shared builders for the test suite: tiny graphs, corpora, enumerations."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

import pytest

from cliquedecomp import GenSpec, WeightedGraph, from_graph, generate


def graph(n, edges):
    return WeightedGraph(n, edges)


def triangle211():
    """Edge weights ab=2, ac=1, bc=1; minimal k is 2."""
    return graph(3, [(0, 1, 2), (0, 2, 1), (1, 2, 1)])


def path3(w1=1, w2=1):
    return graph(3, [(0, 1, w1), (1, 2, w2)])


def complete(n, w=1):
    return graph(n, [(u, v, w) for u in range(n) for v in range(u + 1, n)])


def matrix(g, annotations=None):
    return from_graph(g, annotations)


def _connected(n, edges) -> bool:
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


@lru_cache(maxsize=None)
def connected_structures(n) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All connected graphs on n labeled vertices, one per isomorphism class."""
    pairs = list(combinations(range(n), 2))
    out = []
    seen = set()
    for bits in range(1 << len(pairs)):
        edges = tuple(pairs[i] for i in range(len(pairs)) if bits >> i & 1)
        if not _connected(n, edges):
            continue
        canon = min(
            frozenset((min(p[u], p[v]), max(p[u], p[v])) for u, v in edges)
            for p in permutations(range(n))
        )
        if canon in seen:
            continue
        seen.add(canon)
        out.append(edges)
    return tuple(out)


def weightings(edges, seed=0):
    """Weight assignments in [1,3]: exhaustive when small, fixed patterns otherwise."""
    m = len(edges)
    if m <= 3:
        out = []
        for bits in range(3**m):
            ws, x = [], bits
            for _ in range(m):
                ws.append(x % 3 + 1)
                x //= 3
            out.append(tuple(ws))
        return out
    rng = random.Random((seed, m))
    fixed = [
        tuple([1] * m),
        tuple([2] * m),
        tuple((i % 3) + 1 for i in range(m)),
        tuple(rng.randint(1, 3) for _ in range(m)),
    ]
    return fixed


def random_graph(rng, n, density=0.5, wmax=3):
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                edges.append((u, v, rng.randint(1, wmax)))
    return WeightedGraph(n, edges)


def small_mixed_corpus(count, seed=0, max_n=8):
    """Random small graphs mixed with small planted instances (YES coverage)."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(2, max_n)
        if i % 2 == 0:
            out.append(random_graph(rng, n, density=rng.choice([0.3, 0.5, 0.8])))
        else:
            k_true = rng.randint(1, 3)
            size_hi = max(2, min(n, rng.randint(2, 5)))
            spec = GenSpec(
                n=max(n, size_hi),
                k_true=k_true,
                size_range=(2, size_hi),
                weight_range=(1, 3),
                overlap_bias=Fraction(7, 10),
                seed=rng.getrandbits(63),
            )
            out.append(generate(spec).graph)
    return out
