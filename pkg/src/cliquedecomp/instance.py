"""Weighted graphs, wildcard adjacency matrices, and twin-block partitions.

The matrix form used throughout the package is a symmetric n-by-n array of
nonnegative rationals whose diagonal entries may instead hold a wildcard that
compares equal to anything.  Off-diagonal zeros encode non-edges.  Two
adjacent vertices whose rows agree columnwise under the wildcard-tolerant
comparison are *twins*; maximal groups of pairwise twins are *blocks*, and
every block induces a complete subgraph with one uniform internal edge
weight.  Blocks are what the kernel reduction rules operate on.

All weights are exact ``fractions.Fraction`` values.  Integers and numeric
strings (including decimals such as ``"2.5"``) are accepted and converted
exactly; binary floats are rejected so that no inexact value can leak into
the equality-constrained arithmetic downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "K_MAX",
    "STAR",
    "AnnotatedMatrix",
    "BlockPartition",
    "Entry",
    "InstanceError",
    "InternalConsistencyError",
    "WeightedGraph",
    "as_weight",
    "compute_blocks",
    "from_graph",
    "rows_star_equal",
    "star_equal",
]

# Signature bitmasks and block-count bounds use 2**k enumeration; refuse
# anything wider than this rather than silently thrash.
K_MAX = 26


class InstanceError(ValueError):
    """Invalid construction data for a graph or matrix."""


class InternalConsistencyError(RuntimeError):
    """A computed block partition failed its own pairwise validation."""


class _Star:
    """Singleton wildcard entry; star-equal to every value."""

    _instance: "_Star | None" = None

    def __new__(cls) -> "_Star":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "*"

    def __reduce__(self):
        return (_Star, ())

    def __deepcopy__(self, memo) -> "_Star":
        return self

    def __copy__(self) -> "_Star":
        return self


STAR = _Star()

Entry = Union[Fraction, _Star]


def as_weight(value, *, context: str = "weight") -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Accepts int, Fraction, and numeric strings ("3", "2.5", "5/2").  Binary
    floats are rejected: converting them would silently bake round-off into
    the exact arithmetic.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InstanceError(f"{context} must be a number, got bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"{context} {value!r} is not a valid rational") from exc
    if isinstance(value, float):
        raise InstanceError(
            f"{context} {value!r} is a float; pass a Fraction, int, or decimal string "
            "to keep arithmetic exact"
        )
    raise InstanceError(f"{context} {value!r} has unsupported type {type(value).__name__}")


def star_equal(a: Entry, b: Entry, tol: Fraction | float | None = None) -> bool:
    """Wildcard-tolerant equality: true iff a == b or either side is the wildcard.

    With ``tol`` set, numeric comparison is |a - b| <= tol (floating mode);
    by default the comparison is exact.
    """
    if a is STAR or b is STAR:
        return True
    if tol is not None:
        return abs(a - b) <= tol
    return a == b


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with positive edge weights on vertex ids 0..n-1.

    Edges are normalized to (u, v, w) with u < v.  Self-loops, duplicate
    edges, non-positive weights, and out-of-range ids are rejected.
    """

    n: int
    edges: tuple[tuple[int, int, Fraction], ...]

    def __init__(self, n: int, edges: Iterable[tuple[int, int, object]]):
        if n < 0:
            raise InstanceError(f"vertex count must be >= 0, got {n}")
        normalized = []
        seen: set[tuple[int, int]] = set()
        for u, v, w in edges:
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"edge ({u},{v}) has endpoint outside [0, {n})")
            a, b = (u, v) if u < v else (v, u)
            if (a, b) in seen:
                raise InstanceError(f"duplicate edge ({u},{v})")
            seen.add((a, b))
            weight = as_weight(w, context=f"weight of edge ({u},{v})")
            if weight <= 0:
                raise InstanceError(f"edge ({u},{v}) has non-positive weight {weight}")
            normalized.append((a, b, weight))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[dict[int, Fraction], ...]:
        adj: tuple[dict[int, Fraction], ...] = tuple({} for _ in range(self.n))
        for u, v, w in self.edges:
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def isolated_vertices(self) -> tuple[int, ...]:
        return tuple(u for u in range(self.n) if not self.adjacency[u])

    def weight(self, u: int, v: int) -> Fraction | None:
        """Weight of edge (u, v), or None when absent."""
        return self.adjacency[u].get(v)


@dataclass(frozen=True)
class AnnotatedMatrix:
    """Symmetric matrix over nonnegative rationals with diagonal wildcards.

    ``rows[i][i]`` is either a nonnegative Fraction (an annotated vertex
    weight) or STAR; off-diagonal entries are always numbers, with 0 meaning
    non-edge.  Instances are immutable and safe to share.
    """

    rows: tuple[tuple[Entry, ...], ...]

    def __init__(self, rows: Iterable[Iterable[object]]):
        materialized = [list(r) for r in rows]
        n = len(materialized)
        clean: list[tuple[Entry, ...]] = []
        for i, row in enumerate(materialized):
            if len(row) != n:
                raise InstanceError(f"row {i} has length {len(row)}, expected {n}")
            out: list[Entry] = []
            for j, value in enumerate(row):
                if value is STAR or isinstance(value, _Star):
                    if i != j:
                        raise InstanceError(f"wildcard at off-diagonal position ({i},{j})")
                    out.append(STAR)
                    continue
                num = as_weight(value, context=f"entry ({i},{j})")
                if num < 0:
                    raise InstanceError(f"entry ({i},{j}) is negative: {num}")
                out.append(num)
            clean.append(tuple(out))
        for i in range(n):
            for j in range(i + 1, n):
                if clean[i][j] != clean[j][i]:
                    raise InstanceError(
                        f"matrix not symmetric at ({i},{j}): {clean[i][j]} vs {clean[j][i]}"
                    )
        object.__setattr__(self, "rows", tuple(clean))

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Entry:
        return self.rows[i][j]

    def is_annotated(self, i: int) -> bool:
        return self.rows[i][i] is not STAR

    def has_edge(self, i: int, j: int) -> bool:
        return i != j and self.rows[i][j] != 0

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(
            sum(1 for j in range(self.n) if j != i and self.rows[i][j] != 0)
            for i in range(self.n)
        )

    @cached_property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    def submatrix(self, keep: Sequence[int]) -> "AnnotatedMatrix":
        """Matrix restricted to the given vertex indices, in the given order."""
        return AnnotatedMatrix([[self.rows[i][j] for j in keep] for i in keep])

    def permuted(self, perm: Sequence[int]) -> "AnnotatedMatrix":
        """Reindexed matrix: new position p holds old vertex perm[p]."""
        if sorted(perm) != list(range(self.n)):
            raise InstanceError("permutation must cover all vertex ids exactly once")
        return self.submatrix(perm)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(e) for e in row) for row in self.rows)


def from_graph(
    g: WeightedGraph, annotations: Mapping[int, object] | None = None
) -> AnnotatedMatrix:
    """Weighted adjacency matrix of ``g`` with wildcard diagonal.

    Vertices present in ``annotations`` get their annotation weight on the
    diagonal instead of the wildcard.
    """
    n = g.n
    rows: list[list[Entry]] = [[Fraction(0)] * n for _ in range(n)]
    for u, v, w in g.edges:
        rows[u][v] = w
        rows[v][u] = w
    for i in range(n):
        rows[i][i] = STAR
    if annotations:
        for v, value in annotations.items():
            if not (0 <= v < n):
                raise InstanceError(f"annotation on unknown vertex {v}")
            weight = as_weight(value, context=f"annotation of vertex {v}")
            if weight < 0:
                raise InstanceError(f"annotation of vertex {v} is negative: {weight}")
            rows[v][v] = weight
    return AnnotatedMatrix(rows)


def rows_star_equal(
    A: AnnotatedMatrix, u: int, v: int, tol: Fraction | float | None = None
) -> bool:
    """True iff rows u and v agree columnwise under star-equality."""
    if u == v:
        raise InstanceError("rows_star_equal requires two distinct rows")
    ru, rv = A.rows[u], A.rows[v]
    return all(star_equal(a, b, tol) for a, b in zip(ru, rv))


@dataclass(frozen=True)
class BlockPartition:
    """Partition of vertex ids into twin blocks.

    ``blocks`` lists each block's members in ascending order, blocks ordered
    by smallest member.  ``block_weight[b]`` is the uniform internal edge
    weight of block b (None for singletons).  ``block_of[v]`` maps a vertex
    to its block index.
    """

    blocks: tuple[tuple[int, ...], ...]
    block_weight: tuple[Fraction | None, ...]
    block_of: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.block_of)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_size(self, v: int) -> int:
        return len(self.blocks[self.block_of[v]])

    def members(self, v: int) -> tuple[int, ...]:
        return self.blocks[self.block_of[v]]

    def permuted(self, perm: Sequence[int]) -> "BlockPartition":
        """Partition reindexed so that new position p is old vertex perm[p]."""
        inv = [0] * len(perm)
        for pos, old in enumerate(perm):
            inv[old] = pos
        blocks = sorted(tuple(sorted(inv[v] for v in blk)) for blk in self.blocks)
        return _build_partition(len(perm), blocks, {
            tuple(sorted(inv[v] for v in blk)): w
            for blk, w in zip(self.blocks, self.block_weight)
        })


def _build_partition(
    n: int,
    blocks: list[tuple[int, ...]],
    weights: Mapping[tuple[int, ...], Fraction | None],
) -> BlockPartition:
    blocks = sorted(blocks, key=lambda blk: blk[0])
    block_of = [-1] * n
    for idx, blk in enumerate(blocks):
        for v in blk:
            block_of[v] = idx
    return BlockPartition(
        blocks=tuple(blocks),
        block_weight=tuple(weights[blk] for blk in blocks),
        block_of=tuple(block_of),
    )


def compute_blocks(A: AnnotatedMatrix, *, validate: bool = True) -> BlockPartition:
    """Group vertices of ``A`` into twin blocks.

    Two vertices share a block iff they are adjacent and their rows are
    star-equal.  Grouping works by hashing, for every vertex u and every
    distinct incident edge weight w compatible with u's diagonal, the row of
    u with the diagonal position patched to w.  Two vertices land in the same
    bucket for weight w exactly when they are twins joined by weight-w edges,
    so buckets of size >= 2 are complete pairwise-twin groups and every twin
    pair is found.  A validation pass re-checks all intra-block pairs and
    raises InternalConsistencyError on any violation.
    """
    n = A.n
    buckets: dict[tuple[Entry, ...], list[int]] = {}
    for u in range(n):
        row = A.rows[u]
        diag = row[u]
        weights = {row[j] for j in range(n) if j != u and row[j] != 0}
        for w in weights:
            if diag is not STAR and diag != w:
                continue
            key = row[:u] + (w,) + row[u + 1 :]
            buckets.setdefault(key, []).append(u)

    grouped: set[int] = set()
    blocks: list[tuple[int, ...]] = []
    weights_by_block: dict[tuple[int, ...], Fraction | None] = {}
    for key, members in buckets.items():
        if len(members) < 2:
            continue
        blk = tuple(sorted(members))
        overlap = grouped.intersection(blk)
        if overlap:
            raise InternalConsistencyError(
                f"vertices {sorted(overlap)} grouped into more than one block"
            )
        grouped.update(blk)
        blocks.append(blk)
        weights_by_block[blk] = A.rows[blk[0]][blk[1]]
    for v in range(n):
        if v not in grouped:
            blocks.append((v,))
            weights_by_block[(v,)] = None

    partition = _build_partition(n, blocks, weights_by_block)
    if validate:
        _validate_partition(A, partition)
    return partition


def _validate_partition(A: AnnotatedMatrix, partition: BlockPartition) -> None:
    for blk, weight in zip(partition.blocks, partition.block_weight):
        if len(blk) == 1:
            continue
        for a in range(len(blk)):
            for b in range(a + 1, len(blk)):
                u, v = blk[a], blk[b]
                if A.rows[u][v] != weight:
                    raise InternalConsistencyError(
                        f"block {blk} admits internal entry {A.rows[u][v]} != {weight}"
                    )
                if not A.has_edge(u, v) or not rows_star_equal(A, u, v):
                    raise InternalConsistencyError(
                        f"vertices {u} and {v} grouped but are not twins"
                    )
