"""Ground-truth verification and brute-force decision for small instances.

``verify`` checks the defining matrix identity of a solution exactly.
``brute_force_decide`` enumerates every membership assignment up to clique
column relabeling and asks the LP engine whether weights exist, so it is
independent of the search module's basis guessing, fill order, and pruning
rules.  It is deliberately guarded to small sizes: it exists to anchor the
fast solver, not to compete with it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .instance import STAR, AnnotatedMatrix, star_equal
from .lpfeas import infer_clique_weights
from .solution import Decomposition, subset_sum_fn

__all__ = [
    "OracleSizeError",
    "VerifyReport",
    "brute_force_decide",
    "minimal_k",
    "verify",
]


class OracleSizeError(ValueError):
    """Instance exceeds the brute-force size guard."""


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    first_violation: tuple[int, int, Fraction, object] | None = None


def verify(
    A: AnnotatedMatrix,
    B: Sequence[int],
    gamma: Sequence[Fraction],
    tol: Fraction | float | None = None,
) -> VerifyReport:
    """Check that the solution reproduces every matrix entry up to wildcards.

    For all i <= j the shared-clique weight sum must star-equal A[i][j];
    exact comparison by default, |lhs - rhs| <= tol when given.
    """
    n = A.n
    if len(B) != n:
        raise ValueError(f"solution has {len(B)} rows, matrix has {n}")
    subset_sum = subset_sum_fn(gamma)
    for i in range(n):
        row = A.rows[i]
        for j in range(i, n):
            entry = row[j]
            if entry is STAR:
                continue
            lhs = subset_sum(B[i] & B[j])
            if not star_equal(lhs, entry, tol):
                return VerifyReport(ok=False, first_violation=(i, j, lhs, entry))
    return VerifyReport(ok=True)


def brute_force_decide(
    A: AnnotatedMatrix,
    k: int,
    *,
    max_n: int = 10,
    max_k: int = 3,
    mode: str = "rational",
) -> Decomposition | None:
    """Exhaustive decision: a verified decomposition if one exists, else None.

    Enumerates row assignments in column-canonical form (a new clique column
    may be opened only as the next unused index, so each relabeling class is
    visited once) and runs the weight LP over all assigned rows.  Branches
    whose partial constraint systems are already infeasible are skipped: a
    superset of constraints can never regain feasibility, so this prunes
    nothing that could lead to a solution.

    Raises OracleSizeError beyond the size guard; widen ``max_n``/``max_k``
    explicitly if you really mean it.
    """
    n = A.n
    if n > max_n or k > max_k:
        raise OracleSizeError(
            f"brute force guarded to n <= {max_n}, k <= {max_k}; got n={n}, k={k}"
        )
    if k < 0:
        raise ValueError("k must be >= 0")

    rows: list[int | None] = [None] * n

    def extend(i: int, used: int) -> tuple[Fraction, ...] | None:
        gamma = infer_clique_weights(A, rows, k, mode=mode)
        if gamma is None:
            return None
        if i == n:
            return gamma
        for fresh in range(k - used + 1):
            fresh_bits = ((1 << fresh) - 1) << used
            for old in range(1 << used):
                rows[i] = old | fresh_bits
                result = extend(i + 1, used + fresh)
                if result is not None:
                    return result
        rows[i] = None
        return None

    gamma = extend(0, 0)
    if gamma is None:
        return None
    solution = Decomposition(B=tuple(rows), gamma=gamma)  # type: ignore[arg-type]
    report = verify(A, solution.B, solution.gamma)
    if not report.ok:
        raise RuntimeError(f"internal error: oracle solution fails verify at {report.first_violation}")
    return solution


def minimal_k(
    A: AnnotatedMatrix,
    k_cap: int,
    *,
    max_n: int = 10,
    max_k: int = 3,
) -> int:
    """Smallest k <= k_cap for which the instance decomposes, else k_cap + 1."""
    if k_cap > max_k:
        raise OracleSizeError(f"minimal_k guarded to k_cap <= {max_k}; got {k_cap}")
    for k in range(1, k_cap + 1):
        if brute_force_decide(A, k, max_n=max_n, max_k=max_k) is not None:
            return k
    return k_cap + 1
