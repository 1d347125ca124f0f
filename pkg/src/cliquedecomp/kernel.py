"""Kernel reductions: shrink an instance to an equivalent bounded-size core.

Pipeline order: remove isolated vertices from the graph (``preprocess``),
build the wildcard matrix, then ``kernelize``.  Kernelization first rejects
instances with more than 2**k twin blocks (rule 1), then collapses every
oversized block to a single representative whose diagonal is annotated with
the block's uniform edge weight (rule 2).  The two variants differ only in
the size threshold: the baseline reduces blocks larger than 2**k, giving a
kernel of at most 4**k vertices; the sharper variant reduces blocks larger
than k, giving at most k * 2**k vertices.  ``lift_solution`` undoes the
reductions on a finished solution by copying each representative's
membership row to all the vertices it absorbed.

Both rules presuppose preprocessed input: every vertex must either have an
incident edge or carry a positive annotation, otherwise the block-count
bound does not hold and ``kernelize`` refuses to run.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import (
    K_MAX,
    STAR,
    AnnotatedMatrix,
    BlockPartition,
    InstanceError,
    WeightedGraph,
    compute_blocks,
)
from .solution import Decomposition

__all__ = [
    "ISOLATED_POLICIES",
    "KERNEL_VARIANTS",
    "KernelResult",
    "KernelStats",
    "KernelTrace",
    "TraceRecord",
    "identity_trace",
    "compose_trace",
    "kernelize",
    "krule1",
    "lift_solution",
    "preprocess",
    "reduce_block",
]

KERNEL_VARIANTS = ("cricca", "decaf")
ISOLATED_POLICIES = ("ignore", "consume_k")


@dataclass(frozen=True)
class TraceRecord:
    """One block reduction: kept representative, removed twins, block weight."""

    representative: int
    removed: frozenset[int]
    weight: Fraction


@dataclass(frozen=True)
class KernelTrace:
    """Everything needed to lift a kernel solution back to the source instance.

    Vertex ids in ``removed`` records and ``isolated_removed`` refer to the
    source indexing; ``vertex_map[i]`` is the source id of kernel row i.
    """

    removed: tuple[TraceRecord, ...]
    isolated_removed: frozenset[int]
    vertex_map: tuple[int, ...]

    @property
    def n_source(self) -> int:
        return (
            len(self.vertex_map)
            + sum(len(rec.removed) for rec in self.removed)
            + len(self.isolated_removed)
        )


def identity_trace(n: int) -> KernelTrace:
    return KernelTrace(removed=(), isolated_removed=frozenset(), vertex_map=tuple(range(n)))


@dataclass(frozen=True)
class KernelStats:
    n_before: int
    n_after: int
    block_count: int
    rule_applications: int


@dataclass(frozen=True)
class KernelResult:
    """Outcome of kernelization: a reduced equivalent instance, or a proven NO."""

    status: str  # "reduced" | "no"
    matrix: AnnotatedMatrix | None
    trace: KernelTrace | None
    reason: str | None
    stats: KernelStats

    @property
    def is_no(self) -> bool:
        return self.status == "no"


def preprocess(
    g: WeightedGraph,
    k: int,
    isolated_policy: str = "ignore",
    *,
    keep: frozenset[int] = frozenset(),
) -> tuple[WeightedGraph, int, frozenset[int]]:
    """Remove isolated vertices and adjust k per policy.

    Under "ignore" k is unchanged (edge constraints alone define the
    problem); under "consume_k" each isolated vertex reserves one clique, so
    k drops by the number removed and a negative result means NO.  Vertices
    listed in ``keep`` are never removed (used for externally annotated
    vertices, whose weight constraint must survive).  Remaining vertices are
    re-numbered contiguously in ascending original order.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if isolated_policy not in ISOLATED_POLICIES:
        raise ValueError(f"unknown isolated policy {isolated_policy!r}")
    isolated = frozenset(g.isolated_vertices()) - keep
    if not isolated:
        return g, k, frozenset()
    kept = [v for v in range(g.n) if v not in isolated]
    renum = {v: i for i, v in enumerate(kept)}
    edges = [(renum[u], renum[v], w) for u, v, w in g.edges]
    k_out = k - len(isolated) if isolated_policy == "consume_k" else k
    return WeightedGraph(len(kept), edges), k_out, isolated


def krule1(blocks: BlockPartition, k: int) -> bool:
    """Block-count bound: False (NO-instance) iff there are more than 2**k blocks.

    Valid only for preprocessed instances; see the module docstring.
    """
    if not 0 <= k <= K_MAX:
        raise ValueError(f"k must be in [0, {K_MAX}], got {k}")
    return len(blocks) <= (1 << k)


def reduce_block(
    A: AnnotatedMatrix, block: Iterable[int]
) -> tuple[AnnotatedMatrix, TraceRecord]:
    """Collapse one block to its smallest-id vertex, annotated with the block weight.

    Remaining vertices keep their relative order, so kernel index i maps to
    the i-th kept source id.  Raises on singleton blocks: reducing them is a
    no-op and callers should not ask.
    """
    members = sorted(set(block))
    if len(members) < 2:
        raise InstanceError("cannot reduce a singleton block")
    rep = members[0]
    weight = A.rows[rep][members[1]]
    if weight == 0:
        raise InstanceError(f"vertices {rep} and {members[1]} are not adjacent; not a block")
    removed = frozenset(members[1:])
    keep = [v for v in range(A.n) if v not in removed]
    rows = [[A.rows[i][j] for j in keep] for i in keep]
    rep_pos = keep.index(rep)
    rows[rep_pos][rep_pos] = weight
    record = TraceRecord(representative=rep, removed=removed, weight=weight)
    return AnnotatedMatrix(rows), record


def kernelize(
    A: AnnotatedMatrix,
    k: int,
    variant: str = "decaf",
    *,
    blocks: BlockPartition | None = None,
) -> KernelResult:
    """Apply rule 1 and then the variant's block reduction in one pass.

    Reductions of distinct blocks are independent (rows outside a block are
    unchanged, and a block's columns are mutually redundant to outsiders), so
    all oversized blocks are reduced against one block computation.
    """
    if variant not in KERNEL_VARIANTS:
        raise ValueError(f"unknown kernel variant {variant!r}")
    if not 0 <= k <= K_MAX:
        raise ValueError(f"k must be in [0, {K_MAX}], got {k}")
    for v in range(A.n):
        if A.degrees[v] == 0 and (A.rows[v][v] is STAR or A.rows[v][v] == 0):
            raise InstanceError(
                f"vertex {v} is isolated and unconstrained; preprocess the instance first"
            )
    if blocks is None:
        blocks = compute_blocks(A)
    stats = KernelStats(
        n_before=A.n, n_after=A.n, block_count=len(blocks), rule_applications=0
    )
    if not krule1(blocks, k):
        return KernelResult(
            status="no",
            matrix=None,
            trace=None,
            reason=f"{len(blocks)} blocks exceed the 2^k = {1 << k} bound",
            stats=stats,
        )

    threshold = (1 << k) if variant == "cricca" else max(k, 1)
    oversized = sorted(
        (blk for blk in blocks.blocks if len(blk) > threshold),
        key=lambda blk: (-len(blk), blk[0]),
    )
    entries = [list(row) for row in A.rows]
    removed_all: set[int] = set()
    records = []
    for blk in oversized:
        rep = blk[0]
        weight = blocks.block_weight[blocks.block_of[rep]]
        entries[rep][rep] = weight
        removed_all.update(blk[1:])
        records.append(
            TraceRecord(representative=rep, removed=frozenset(blk[1:]), weight=weight)
        )
    keep = [v for v in range(A.n) if v not in removed_all]
    matrix = AnnotatedMatrix([[entries[i][j] for j in keep] for i in keep])
    trace = KernelTrace(
        removed=tuple(records), isolated_removed=frozenset(), vertex_map=tuple(keep)
    )
    return KernelResult(
        status="reduced",
        matrix=matrix,
        trace=trace,
        reason=None,
        stats=replace(stats, n_after=matrix.n, rule_applications=len(records)),
    )


def compose_trace(
    kept_source_ids: Sequence[int],
    isolated_removed: frozenset[int],
    ktrace: KernelTrace,
) -> KernelTrace:
    """Re-base a kernel trace through an earlier vertex renumbering.

    ``kept_source_ids[i]`` is the source id of the instance's vertex i (the
    numbering the trace was computed in).  The result speaks entirely in
    source ids and carries the isolated set removed by preprocessing.
    """
    remap = list(kept_source_ids)
    return KernelTrace(
        removed=tuple(
            TraceRecord(
                representative=remap[rec.representative],
                removed=frozenset(remap[v] for v in rec.removed),
                weight=rec.weight,
            )
            for rec in ktrace.removed
        ),
        isolated_removed=isolated_removed,
        vertex_map=tuple(remap[v] for v in ktrace.vertex_map),
    )


def lift_solution(
    sol: Decomposition,
    trace: KernelTrace,
    *,
    isolated_policy: str = "ignore",
    original: AnnotatedMatrix | None = None,
) -> Decomposition:
    """Transport a kernel solution back to the source instance.

    Every removed twin copies its representative's membership row.  Cliques
    that remain singletons after lifting are dropped when their lone member
    is unannotated in the source (their weight constrains nothing there);
    singletons on annotated vertices are kept.  Under the "consume_k" policy
    each isolated vertex receives its own fresh singleton clique of weight 1,
    which the source instance leaves unconstrained.
    """
    if isolated_policy not in ISOLATED_POLICIES:
        raise ValueError(f"unknown isolated policy {isolated_policy!r}")
    if len(sol.B) != len(trace.vertex_map):
        raise ValueError(
            f"solution has {len(sol.B)} rows but trace maps {len(trace.vertex_map)} kernel vertices"
        )
    n_out = trace.n_source
    if original is not None and original.n != n_out:
        raise ValueError(f"trace reconstructs {n_out} vertices, original has {original.n}")

    rows = [0] * n_out
    kernel_row_of = {src: i for i, src in enumerate(trace.vertex_map)}
    for i, src in enumerate(trace.vertex_map):
        rows[src] = sol.B[i]
    for rec in trace.removed:
        rep_row = kernel_row_of.get(rec.representative)
        if rep_row is None:
            raise ValueError(f"trace representative {rec.representative} not in vertex map")
        sig = sol.B[rep_row]
        for v in rec.removed:
            rows[v] = sig

    gamma = list(sol.gamma)
    for q, weight in enumerate(gamma):
        if weight <= 0:
            continue
        bit = 1 << q
        members = [v for v in range(n_out) if rows[v] & bit]
        if len(members) == 1:
            v = members[0]
            if original is None or original.rows[v][v] is STAR:
                rows[v] &= ~bit

    if isolated_policy == "consume_k":
        for v in sorted(trace.isolated_removed):
            rows[v] |= 1 << len(gamma)
            gamma.append(Fraction(1))

    return Decomposition(B=tuple(rows), gamma=tuple(gamma))
