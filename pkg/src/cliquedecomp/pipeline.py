"""End-to-end solve: preprocess, kernelize, search, lift, verify.

This is the one place that composes the stage modules and keeps the three
vertex numberings straight (source graph, preprocessed graph, kernel).  The
returned decomposition always lives on the source graph and has already been
checked against it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .instance import STAR, AnnotatedMatrix, WeightedGraph, compute_blocks, from_graph
from .kernel import (
    KernelResult,
    KernelStats,
    KernelTrace,
    compose_trace,
    identity_trace,
    kernelize,
    lift_solution,
    preprocess,
)
from .oracle import verify
from .search import SolveConfig, SolveStats, clique_decomp
from .solution import Decomposition

__all__ = ["PipelineResult", "solve_instance"]


@dataclass(frozen=True)
class PipelineResult:
    outcome: str  # yes | no | timeout
    decomposition: Decomposition | None
    stats: SolveStats
    kernel: KernelResult | None
    k_input: int
    k_effective: int
    n_kernel: int
    isolated_removed: frozenset[int]
    wall_time: float


def _edge_free_outcome(matrix: AnnotatedMatrix) -> bool:
    """Zero cliques suffice iff nothing in the matrix demands positive weight."""
    for i in range(matrix.n):
        diag = matrix.rows[i][i]
        if diag is not STAR and diag != 0:
            return False
        for j in range(i + 1, matrix.n):
            if matrix.rows[i][j] != 0:
                return False
    return True


def solve_instance(
    g: WeightedGraph,
    k: int,
    *,
    annotations: Mapping[int, Fraction] | None = None,
    kernel_variant: str = "decaf",
    config: SolveConfig | None = None,
    isolated_policy: str = "ignore",
) -> PipelineResult:
    """Solve one instance end to end and lift the answer back to ``g``.

    ``kernel_variant`` is "decaf", "cricca", or "none" (skip kernelization).
    The decomposition of a yes outcome is verified against the source matrix
    before being returned.
    """
    if kernel_variant not in ("none", "cricca", "decaf"):
        raise ValueError(f"unknown kernel variant {kernel_variant!r}")
    config = config or SolveConfig()
    config.validate()
    started = time.monotonic()
    annotations = dict(annotations or {})
    source_matrix = from_graph(g, annotations)

    def done(
        outcome: str,
        decomposition: Decomposition | None = None,
        stats: SolveStats | None = None,
        kernel: KernelResult | None = None,
        k_eff: int = 0,
        n_kernel: int = 0,
        isolated: frozenset[int] = frozenset(),
    ) -> PipelineResult:
        return PipelineResult(
            outcome=outcome,
            decomposition=decomposition,
            stats=stats if stats is not None else SolveStats(outcome=outcome),
            kernel=kernel,
            k_input=k,
            k_effective=k_eff,
            n_kernel=n_kernel,
            isolated_removed=isolated,
            wall_time=time.monotonic() - started,
        )

    pre_graph, k_eff, isolated = preprocess(
        g, k, isolated_policy, keep=frozenset(annotations)
    )
    if k_eff < 0:
        return done("no", isolated=isolated)
    kept = [v for v in range(g.n) if v not in isolated]
    renum = {v: i for i, v in enumerate(kept)}
    pre_annotations = {renum[v]: w for v, w in annotations.items()}
    pre_matrix = from_graph(pre_graph, pre_annotations)

    kernel_result: KernelResult | None = None
    if kernel_variant == "none" or pre_matrix.n == 0:
        kernel_matrix = pre_matrix
        trace = compose_trace(kept, isolated, identity_trace(pre_matrix.n))
    else:
        kernel_result = kernelize(pre_matrix, k_eff, kernel_variant)
        if kernel_result.is_no:
            return done("no", kernel=kernel_result, k_eff=k_eff, isolated=isolated,
                        n_kernel=pre_matrix.n)
        kernel_matrix = kernel_result.matrix
        trace = compose_trace(kept, isolated, kernel_result.trace)

    if kernel_matrix.n == 0 or k_eff == 0:
        if kernel_matrix.n == 0 or _edge_free_outcome(kernel_matrix):
            empty = Decomposition(B=(0,) * kernel_matrix.n, gamma=(Fraction(0),) * k_eff)
            lifted = lift_solution(
                empty, trace, isolated_policy=isolated_policy, original=source_matrix
            )
            report = verify(source_matrix, lifted.B, lifted.gamma)
            if not report.ok:
                raise RuntimeError(f"internal error: trivial lift fails verify: {report}")
            return done(
                "yes",
                decomposition=lifted,
                stats=SolveStats(outcome="yes"),
                kernel=kernel_result,
                k_eff=k_eff,
                n_kernel=kernel_matrix.n,
                isolated=isolated,
            )
        return done(
            "no", kernel=kernel_result, k_eff=k_eff,
            n_kernel=kernel_matrix.n, isolated=isolated,
        )

    kernel_blocks = compute_blocks(kernel_matrix)
    found, stats = clique_decomp(
        kernel_matrix, k_eff, config, blocks=kernel_blocks, trace=trace
    )
    if found is None:
        return done(
            stats.outcome, stats=stats, kernel=kernel_result,
            k_eff=k_eff, n_kernel=kernel_matrix.n, isolated=isolated,
        )
    lifted = lift_solution(
        found, trace, isolated_policy=isolated_policy, original=source_matrix
    )
    tol = None if config.lp_mode == "rational" else 1e-9
    report = verify(source_matrix, lifted.B, lifted.gamma, tol=tol)
    if not report.ok:
        raise RuntimeError(
            f"internal error: lifted solution fails verify at {report.first_violation}"
        )
    return done(
        "yes",
        decomposition=lifted,
        stats=stats,
        kernel=kernel_result,
        k_eff=k_eff,
        n_kernel=kernel_matrix.n,
        isolated=isolated,
    )
