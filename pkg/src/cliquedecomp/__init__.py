"""Exact decomposition of edge-weighted graphs into at most k weighted cliques.

The package decides, exactly over rationals, whether a weighted graph splits
into at most k overlapping cliques whose weights sum to every edge weight,
and produces a witness when it does.  The pipeline is: remove isolated
vertices, collapse oversized twin blocks to annotated representatives
(kernelization), search membership signatures with LP-guided backtracking,
then lift the kernel solution back to the input graph.  A brute-force oracle
and a planted-instance generator anchor correctness testing and
benchmarking.
"""

from .instance import (
    K_MAX,
    STAR,
    AnnotatedMatrix,
    BlockPartition,
    InstanceError,
    InternalConsistencyError,
    WeightedGraph,
    compute_blocks,
    from_graph,
    rows_star_equal,
    star_equal,
)
from .kernel import (
    KernelResult,
    KernelStats,
    KernelTrace,
    TraceRecord,
    kernelize,
    krule1,
    lift_solution,
    preprocess,
    reduce_block,
)
from .lpfeas import LpProblem, infer_clique_weights, solve_feasibility
from .oracle import OracleSizeError, VerifyReport, brute_force_decide, minimal_k, verify
from .pipeline import PipelineResult, solve_instance
from .search import (
    ORDERINGS,
    PartialSolution,
    SolveConfig,
    SolveStats,
    candidate_signatures,
    clique_decomp,
    fill_non_basis,
    is_w_compatible,
    order_vertices,
)
from .gen import GenSpec, PlantedInstance, SplitMix64, corpus, derive_seed, generate
from .solution import Decomposition

__version__ = "0.1.0"

__all__ = [
    "AnnotatedMatrix",
    "BlockPartition",
    "Decomposition",
    "GenSpec",
    "InstanceError",
    "InternalConsistencyError",
    "K_MAX",
    "KernelResult",
    "KernelStats",
    "KernelTrace",
    "LpProblem",
    "ORDERINGS",
    "OracleSizeError",
    "PartialSolution",
    "PipelineResult",
    "PlantedInstance",
    "STAR",
    "SolveConfig",
    "SolveStats",
    "SplitMix64",
    "TraceRecord",
    "VerifyReport",
    "WeightedGraph",
    "brute_force_decide",
    "candidate_signatures",
    "clique_decomp",
    "compute_blocks",
    "corpus",
    "derive_seed",
    "fill_non_basis",
    "from_graph",
    "generate",
    "infer_clique_weights",
    "is_w_compatible",
    "kernelize",
    "krule1",
    "lift_solution",
    "minimal_k",
    "order_vertices",
    "preprocess",
    "reduce_block",
    "rows_star_equal",
    "solve_feasibility",
    "solve_instance",
    "star_equal",
    "verify",
]
