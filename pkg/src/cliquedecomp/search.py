"""Backtracking decomposition search with LP-guided weight inference.

The solver guesses *basis* membership rows one at a time.  After each guess
it infers clique weights by LP feasibility over all guessed rows; if weights
exist it fills every remaining row greedily with the first candidate
signature compatible with the fixed weights, and the first row where no
candidate survives becomes the position of the next basis guess.  A finished
fill is a verified solution.  A branch dies when its LP is infeasible or
when 2k basis rows have been guessed without completing, which bounds the
guessing depth by the pseudo-rank of the membership matrix.

Three search rules prune candidates; each can be toggled independently so
their cost/benefit can be benchmarked:

* rule 0 is the vertex ordering (``push_front`` starts with representatives
  of reduced blocks),
* rule 1 drops signatures sharing a clique with an assigned non-neighbor,
* rule 2 enforces signature discipline on twin blocks: distinct blocks never
  share a (nonzero) signature, twins are never in a proper subset relation,
  and each block is either all-identical or pairwise distinct.

Candidates enumerate in ascending bitmask order, so runs are deterministic
and counter comparisons across configurations are meaningful.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .instance import (
    K_MAX,
    STAR,
    AnnotatedMatrix,
    BlockPartition,
    compute_blocks,
    star_equal,
)
from .kernel import KernelTrace
from .lpfeas import LpProblem, solve_feasibility
from .solution import Decomposition, subset_sum_fn

__all__ = [
    "EPS_CMP",
    "ORDERINGS",
    "PartialSolution",
    "SolveConfig",
    "SolveStats",
    "candidate_signatures",
    "clique_decomp",
    "fill_non_basis",
    "is_w_compatible",
    "order_vertices",
]

EPS_CMP = 1e-9
ORDERINGS = ("arbitrary", "push_front", "push_back", "keep_first")

_TIME_CHECK_INTERVAL = 4096  # signature tests between timeout checks


@dataclass
class SolveConfig:
    """Knobs of one solver run; defaults reproduce the full-rules configuration."""

    ordering: str = "push_front"
    srule1: bool = True
    srule2: bool = True
    column_symmetry_breaking: bool = False
    lp_mode: str = "rational"
    timeout: float | None = None
    count_lp_runs: bool = True

    def validate(self) -> None:
        if self.ordering not in ORDERINGS:
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if self.lp_mode not in ("rational", "float"):
            raise ValueError(f"unknown lp mode {self.lp_mode!r}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive when given")


@dataclass
class SolveStats:
    """Counters of one run.  ``backtracks`` counts retracted basis guesses."""

    lp_runs: int = 0
    signatures_tested: int = 0
    backtracks: int = 0
    wall_time: float = 0.0
    outcome: str = "no"  # yes | no | timeout
    max_basis_depth: int = 0


class _Timeout(Exception):
    pass


def _proper_subset(a: int, b: int) -> bool:
    return a != b and (a & b) == a


class PartialSolution:
    """Mutable assignment state over a fixed matrix: rows, block bookkeeping, weights.

    Positions refer to the matrix handed in (the solver works in assignment
    order, so it passes a permuted matrix).  ``assign``/``unassign`` keep the
    per-block signature lists and global signature counts that rule 2 needs.
    """

    def __init__(
        self,
        matrix: AnnotatedMatrix,
        k: int,
        blocks: BlockPartition | None = None,
        *,
        float_mode: bool = False,
    ):
        if not 1 <= k <= K_MAX:
            raise ValueError(f"k must be in [1, {K_MAX}], got {k}")
        self.matrix = matrix
        self.k = k
        self.blocks = blocks if blocks is not None else compute_blocks(matrix)
        if self.blocks.n != matrix.n:
            raise ValueError("block partition does not match matrix size")
        self.tol = EPS_CMP if float_mode else None
        n = matrix.n
        self.sigs: list[int | None] = [None] * n
        self.assigned: list[int] = []
        self._nonadj: tuple[tuple[int, ...], ...] = tuple(
            tuple(j for j in range(n) if j != i and matrix.rows[i][j] == 0)
            for i in range(n)
        )
        self._sig_global: Counter = Counter()
        self._sig_by_block: list[Counter] = [Counter() for _ in self.blocks.blocks]
        self._block_lists: list[list[int]] = [[] for _ in self.blocks.blocks]
        self._col_use = [0] * k
        self.gamma: tuple[Fraction, ...] | None = None
        self.subset_sum = None

    @property
    def assigned_count(self) -> int:
        return len(self.assigned)

    def set_weights(self, gamma: Sequence[Fraction]) -> None:
        self.gamma = tuple(gamma)
        self.subset_sum = subset_sum_fn(self.gamma)

    def assign(self, pos: int, sig: int) -> None:
        if self.sigs[pos] is not None:
            raise ValueError(f"position {pos} already assigned")
        self.sigs[pos] = sig
        self.assigned.append(pos)
        b = self.blocks.block_of[pos]
        self._sig_global[sig] += 1
        self._sig_by_block[b][sig] += 1
        self._block_lists[b].append(sig)
        m = sig
        while m:
            low = m & -m
            self._col_use[low.bit_length() - 1] += 1
            m ^= low

    def unassign(self, pos: int) -> None:
        sig = self.sigs[pos]
        if sig is None:
            raise ValueError(f"position {pos} is not assigned")
        self.sigs[pos] = None
        if self.assigned and self.assigned[-1] == pos:
            self.assigned.pop()
        else:
            self.assigned.remove(pos)
        b = self.blocks.block_of[pos]
        self._sig_global[sig] -= 1
        self._sig_by_block[b][sig] -= 1
        self._block_lists[b].remove(sig)
        m = sig
        while m:
            low = m & -m
            self._col_use[low.bit_length() - 1] -= 1
            m ^= low

    def forbidden_mask(self, pos: int) -> int:
        """OR of signatures assigned to non-neighbors of ``pos``."""
        mask = 0
        sigs = self.sigs
        for j in self._nonadj[pos]:
            s = sigs[j]
            if s is not None:
                mask |= s
        return mask

    def zero_sig_allowed(self, pos: int) -> bool:
        """The all-zero signature is valid only for unconstrained vertices.

        A vertex with an incident edge must join at least one clique; an
        annotated vertex must meet its weight, so zero requires weight zero.
        """
        diag = self.matrix.rows[pos][pos]
        if diag is STAR:
            return self.matrix.degrees[pos] == 0
        return diag == 0

    def used_columns(self) -> int:
        mask = 0
        for q, count in enumerate(self._col_use):
            if count:
                mask |= 1 << q
        return mask

    def sig_used_in_other_block(self, sig: int, pos: int) -> bool:
        total = self._sig_global.get(sig, 0)
        if not total:
            return False
        own = self._sig_by_block[self.blocks.block_of[pos]].get(sig, 0)
        return total > own

    def block_assigned(self, pos: int) -> list[int]:
        return self._block_lists[self.blocks.block_of[pos]]


def order_vertices(
    blocks: BlockPartition, trace: KernelTrace | None, strategy: str
) -> list[int]:
    """Assignment order of the matrix's vertices under the named strategy.

    ``push_front`` places representatives of reduced blocks first (ascending
    id), ``push_back`` places them last; ``arbitrary`` and ``keep_first`` do
    not reorder (the kernel always keeps the smallest id of a block, so the
    earliest-member convention is the identity here).
    """
    if strategy not in ORDERINGS:
        raise ValueError(f"unknown ordering {strategy!r}")
    n = blocks.n
    identity = list(range(n))
    if strategy in ("arbitrary", "keep_first") or trace is None or not trace.removed:
        return identity
    kernel_of = {src: i for i, src in enumerate(trace.vertex_map)}
    reps = set()
    for rec in trace.removed:
        pos = kernel_of.get(rec.representative)
        if pos is None:
            raise ValueError(
                f"trace representative {rec.representative} is not a vertex of this matrix"
            )
        reps.add(pos)
    front = sorted(reps)
    rest = [v for v in identity if v not in reps]
    if strategy == "push_front":
        return front + rest
    return rest + front  # push_back


def candidate_signatures(
    v: int, state: PartialSolution, cfg: SolveConfig, *, basis: bool = False
) -> Iterator[int]:
    """Signatures admissible for vertex ``v`` under the enabled rules, ascending.

    Rule 1 restricts enumeration to submasks of the complement of the
    forbidden mask.  Rule 2 applies cross-block uniqueness (nonzero
    signatures only: unconstrained vertices may all sit at zero), the twin
    subset exclusion, and the identical-or-distinct block discipline.  The
    zero signature is withheld from any vertex that provably needs a clique.
    Column symmetry breaking, when enabled, applies to basis guesses only.
    """
    k = state.k
    full = (1 << k) - 1
    allowed = full
    if cfg.srule1:
        allowed = full & ~state.forbidden_mask(v)
    zero_ok = state.zero_sig_allowed(v)
    symmetry = basis and cfg.column_symmetry_breaking
    used = state.used_columns() if symmetry else 0

    forced: int | None = None
    own: list[int] = []
    own_multi = False
    if cfg.srule2 and state.blocks.block_size(v) >= 2:
        own = state.block_assigned(v)
        if own:
            first = own[0]
            if all(t == first for t in own):
                if len(own) >= 2:
                    forced = first
            else:
                own_multi = True  # pairwise distinct mode is locked

    s = 0
    while True:
        ok = True
        if s == 0 and not zero_ok:
            ok = False
        if ok and symmetry:
            reachable = ((used | s) << 1) | 1
            if s & ~reachable:
                ok = False
        if ok and cfg.srule2:
            if s and state.sig_used_in_other_block(s, v):
                ok = False
            elif forced is not None:
                ok = s == forced
            elif own_multi or (own and s != own[0]):
                for t in own:
                    if s == t or _proper_subset(s, t) or _proper_subset(t, s):
                        ok = False
                        break
        if ok:
            yield s
        if s == allowed:
            return
        s = (s - allowed) & allowed


def is_w_compatible(
    A: AnnotatedMatrix,
    B: "PartialSolution | Sequence[int | None]",
    W: Sequence[Fraction],
    i: int,
    v: int,
    tol: float | None = None,
) -> bool:
    """Would assigning signature ``v`` to row i keep the fixed weights consistent?

    True iff the shared-clique sum with every assigned row equals the matrix
    entry, and the diagonal sum star-equals the vertex's own entry.
    """
    sigs = B.sigs if isinstance(B, PartialSolution) else B
    subset_sum = subset_sum_fn(W)
    row = A.rows[i]
    for j, sig in enumerate(sigs):
        if sig is None or j == i:
            continue
        lhs = subset_sum(v & sig)
        if not star_equal(lhs, row[j], tol):
            return False
    return star_equal(subset_sum(v), row[i], tol)


def fill_non_basis(
    A: AnnotatedMatrix,
    Bt: Sequence[int | None],
    W: Sequence[Fraction],
    cfg: SolveConfig | None = None,
    *,
    blocks: BlockPartition | None = None,
) -> tuple[list[int | None], int]:
    """Greedy completion of a partial assignment under fixed weights.

    Processes null rows in position order, assigning the first candidate
    signature that passes the enabled rules and the compatibility check.
    Returns the resulting rows plus ``A.n`` when every row was filled, or the
    index of the first unfillable row.
    """
    cfg = cfg or SolveConfig()
    cfg.validate()
    k = len(W)
    state = PartialSolution(A, k, blocks, float_mode=cfg.lp_mode == "float")
    for pos, sig in enumerate(Bt):
        if sig is not None:
            state.assign(pos, sig)
    state.set_weights(W)
    filled, stuck = _fill_state(state, cfg)
    rows = list(state.sigs)
    for pos in reversed(filled):
        state.unassign(pos)
    return rows, (A.n if stuck is None else stuck)


def _fill_state(
    state: PartialSolution,
    cfg: SolveConfig,
    stats: SolveStats | None = None,
    ticker=None,
) -> tuple[list[int], int | None]:
    """Fill all null rows of ``state`` in place; see fill_non_basis.

    Returns the list of positions assigned here (for unwinding) and the
    stuck position, None when complete.
    """
    matrix = state.matrix
    sigs = state.sigs
    tol = state.tol
    subset_sum = state.subset_sum
    filled: list[int] = []
    for pos in range(matrix.n):
        if sigs[pos] is not None:
            continue
        row = matrix.rows[pos]
        # Collapse the compatibility constraints to distinct (signature, rhs)
        # pairs; rows sharing a signature impose one identical check.
        first_rhs: dict[int, object] = {}
        cons: list[tuple[int, object]] = []
        for j in state.assigned:
            s = sigs[j]
            rhs = row[j]
            prev = first_rhs.get(s)
            if prev is None:
                first_rhs[s] = rhs
                cons.append((s, rhs))
            elif prev != rhs:
                cons.append((s, rhs))
        diag = row[pos]
        found = None
        for v in candidate_signatures(pos, state, cfg):
            if stats is not None:
                stats.signatures_tested += 1
                if ticker is not None:
                    ticker()
            ok = True
            for s, rhs in cons:
                if not star_equal(subset_sum(v & s), rhs, tol):
                    ok = False
                    break
            if ok and star_equal(subset_sum(v), diag, tol):
                found = v
                break
        if found is None:
            return filled, pos
        state.assign(pos, found)
        filled.append(pos)
    return filled, None


class _Search:
    def __init__(
        self,
        matrix: AnnotatedMatrix,
        k: int,
        cfg: SolveConfig,
        blocks: BlockPartition,
        stats: SolveStats,
        deadline: float | None,
    ):
        self.matrix = matrix
        self.k = k
        self.cfg = cfg
        self.stats = stats
        self.deadline = deadline
        self.state = PartialSolution(matrix, k, blocks, float_mode=cfg.lp_mode == "float")
        self._lp_cache: dict[frozenset, tuple[Fraction, ...] | None] = {}
        self._tick = 0

    def run(self) -> tuple[list[int], tuple[Fraction, ...]] | None:
        if self.matrix.n == 0:
            raise ValueError("cannot solve an empty matrix")
        return self._dfs(0)

    def _dfs(self, depth: int) -> tuple[list[int], tuple[Fraction, ...]] | None:
        state = self.state
        if depth:
            gamma = self._infer()
            if gamma is None:
                return None
            state.set_weights(gamma)
            filled, stuck = _fill_state(state, self.cfg, self.stats, self._ticker)
            if stuck is None:
                solution = ([int(s) for s in state.sigs], gamma)
                for pos in reversed(filled):
                    state.unassign(pos)
                return solution
            for pos in reversed(filled):
                state.unassign(pos)
            if depth == 2 * self.k:
                return None
        else:
            stuck = 0
        for v in candidate_signatures(stuck, state, self.cfg, basis=True):
            self.stats.signatures_tested += 1
            self._ticker()
            state.assign(stuck, v)
            if depth + 1 > self.stats.max_basis_depth:
                self.stats.max_basis_depth = depth + 1
            result = self._dfs(depth + 1)
            state.unassign(stuck)
            if result is not None:
                return result
            self.stats.backtracks += 1
        return None

    def _infer(self) -> tuple[Fraction, ...] | None:
        self._check_time()
        self.stats.lp_runs += 1
        rows = self.matrix.rows
        sigs = self.state.sigs
        assigned = self.state.assigned
        cons = set()
        for a, i in enumerate(assigned):
            diag = rows[i][i]
            if diag is not STAR:
                cons.add((sigs[i], diag))
            for j in assigned[a + 1 :]:
                cons.add((sigs[i] & sigs[j], rows[i][j]))
        key = frozenset(cons)
        if key in self._lp_cache:
            return self._lp_cache[key]
        gamma = solve_feasibility(
            LpProblem(self.k, tuple(cons)), mode=self.cfg.lp_mode
        )
        self._lp_cache[key] = gamma
        return gamma

    def _ticker(self) -> None:
        self._tick += 1
        if self._tick >= _TIME_CHECK_INTERVAL:
            self._tick = 0
            self._check_time()

    def _check_time(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _Timeout


def clique_decomp(
    A: AnnotatedMatrix,
    k: int,
    cfg: SolveConfig | None = None,
    *,
    blocks: BlockPartition | None = None,
    trace: KernelTrace | None = None,
) -> tuple[Decomposition | None, SolveStats]:
    """Decide whether ``A`` decomposes into at most k weighted cliques.

    Returns (decomposition, stats) on success and (None, stats) otherwise;
    ``stats.outcome`` distinguishes a proven "no" from a "timeout".  Every
    returned decomposition has been checked against the matrix.  ``trace``
    only informs the push_front/push_back orderings; pass the kernelization
    trace when solving a kernel.
    """
    cfg = cfg or SolveConfig()
    cfg.validate()
    if A.n < 1:
        raise ValueError("matrix must have at least one vertex")
    if not 1 <= k <= K_MAX:
        raise ValueError(f"k must be in [1, {K_MAX}], got {k}")
    stats = SolveStats()
    started = time.monotonic()
    deadline = started + cfg.timeout if cfg.timeout is not None else None
    if blocks is None:
        blocks = compute_blocks(A)
    order = order_vertices(blocks, trace, cfg.ordering)
    matrix = A.permuted(order)
    search = _Search(matrix, k, cfg, blocks.permuted(order), stats, deadline)
    try:
        found = search.run()
    except _Timeout:
        stats.outcome = "timeout"
        stats.wall_time = time.monotonic() - started
        return None, stats
    stats.wall_time = time.monotonic() - started
    if found is None:
        stats.outcome = "no"
        return None, stats
    rows_perm, gamma = found
    rows = [0] * A.n
    for pos, sig in enumerate(rows_perm):
        rows[order[pos]] = sig
    decomposition = Decomposition(B=tuple(rows), gamma=gamma)
    from .oracle import verify  # local import: oracle depends on solution, not on search

    report = verify(A, decomposition.B, decomposition.gamma, tol=search.state.tol)
    if not report.ok:
        raise RuntimeError(
            f"internal error: search produced an invalid solution at {report.first_violation}"
        )
    stats.outcome = "yes"
    return decomposition, stats
