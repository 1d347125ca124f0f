"""LP feasibility for clique weights under equality constraints.

Every constraint has the shape  sum_{q in mask} gamma_q = rhs  with rhs >= 0
and gamma >= 0, where the mask is the bitwise AND of two membership rows.
Feasibility is decided exactly over rationals by default: constraints are
deduplicated, presolved (forced zeros, conflicting right-hand sides), reduced
by Gauss-Jordan elimination, and any remaining degrees of freedom are settled
by a phase-1 simplex with Bland's rule.  A floating mode with tolerance
``EPS_LP`` is available for comparison runs; it never changes the contract,
only the arithmetic.

Infeasibility is a contract outcome, not an error: solvers return None.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .instance import STAR, AnnotatedMatrix

__all__ = [
    "EPS_LP",
    "LpProblem",
    "constraints_from_rows",
    "infer_clique_weights",
    "solve_feasibility",
]

EPS_LP = 1e-9


@dataclass(frozen=True)
class LpProblem:
    """Feasibility problem: find gamma >= 0 with sum_{q in mask} gamma_q = rhs for all constraints."""

    k: int
    constraints: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        full = (1 << self.k) - 1
        for mask, rhs in self.constraints:
            if mask < 0 or mask & ~full:
                raise ValueError(f"constraint mask {mask:#x} out of range for k={self.k}")
            if rhs < 0:
                raise ValueError(f"constraint rhs {rhs} is negative")


def constraints_from_rows(
    A: AnnotatedMatrix, rows: Sequence[int | None], k: int
) -> LpProblem:
    """Constraint system induced by the non-null rows of a partial assignment.

    For every pair (i, j) of assigned rows, including i == j when the
    diagonal is annotated, the shared cliques must sum to the matrix entry.
    Wildcard entries impose nothing.
    """
    assigned = [i for i, sig in enumerate(rows) if sig is not None]
    cons: list[tuple[int, Fraction]] = []
    for a, i in enumerate(assigned):
        row_i = A.rows[i]
        sig_i = rows[i]
        if row_i[i] is not STAR:
            cons.append((sig_i, row_i[i]))
        for j in assigned[a + 1 :]:
            entry = row_i[j]
            cons.append((sig_i & rows[j], entry))
    return LpProblem(k=k, constraints=tuple(cons))


def infer_clique_weights(
    A: AnnotatedMatrix,
    rows: Sequence[int | None],
    k: int,
    *,
    mode: str = "rational",
) -> tuple[Fraction, ...] | None:
    """Nonnegative clique weights satisfying all constraints induced by ``rows``, or None.

    With no constraints (e.g. a single unannotated row) the zero vector is
    returned.
    """
    return solve_feasibility(constraints_from_rows(A, rows, k), mode=mode)


def solve_feasibility(
    problem: LpProblem, *, mode: str = "rational"
) -> tuple[Fraction, ...] | None:
    """Feasible point of ``problem`` or None if the system has no solution."""
    if mode not in ("rational", "float"):
        raise ValueError(f"unknown LP mode {mode!r}")
    exact = mode == "rational"
    k = problem.k

    # Deduplicate by mask; identical masks with different right-hand sides
    # conflict immediately, and an empty mask forces rhs == 0.
    by_mask: dict[int, Fraction] = {}
    for mask, rhs in problem.constraints:
        rhs = Fraction(rhs) if not isinstance(rhs, Fraction) else rhs
        seen = by_mask.get(mask)
        if seen is None:
            by_mask[mask] = rhs
        elif not _eq(seen, rhs, exact):
            return None
    if 0 in by_mask:
        if not _eq(by_mask[0], Fraction(0), exact):
            return None
        del by_mask[0]

    # gamma >= 0 turns every rhs == 0 constraint into forced zeros.
    forced_zero = 0
    for mask, rhs in by_mask.items():
        if rhs == 0:
            forced_zero |= mask
    reduced: dict[int, Fraction] = {}
    for mask, rhs in by_mask.items():
        if rhs == 0:
            continue
        mask &= ~forced_zero
        if mask == 0:
            return None
        seen = reduced.get(mask)
        if seen is None:
            reduced[mask] = rhs
        elif not _eq(seen, rhs, exact):
            return None

    free_vars = [q for q in range(k) if not forced_zero & (1 << q)]
    gamma = _solve_nonneg(reduced, free_vars, exact)
    if gamma is None:
        return None
    out = [Fraction(0)] * k
    for q, value in zip(free_vars, gamma):
        out[q] = value
    if not _check(problem, out, exact):
        if exact:
            raise RuntimeError("internal error: simplex produced an unsound point")
        return None
    return tuple(out)


def _eq(a, b, exact: bool) -> bool:
    if exact:
        return a == b
    return abs(a - b) <= EPS_LP


def _check(problem: LpProblem, gamma: Sequence[Fraction], exact: bool) -> bool:
    for mask, rhs in problem.constraints:
        total = Fraction(0)
        m = mask
        while m:
            low = m & -m
            total += gamma[low.bit_length() - 1]
            m ^= low
        if not _eq(total, rhs, exact):
            return False
    return True


def _solve_nonneg(
    constraints: dict[int, Fraction], variables: list[int], exact: bool
) -> list[Fraction] | None:
    """Solve sum_{q in mask} x_q = rhs, x >= 0, over the listed variables.

    Gauss-Jordan elimination first: it detects inconsistency and, when the
    system pins every variable, yields the unique candidate directly.  Only
    genuinely underdetermined systems reach the phase-1 simplex.
    """
    nvars = len(variables)
    if not constraints:
        return [Fraction(0)] * nvars
    if nvars == 0:
        return None  # constraints remain but no variables are left

    col_of = {q: idx for idx, q in enumerate(variables)}
    rows: list[list[Fraction]] = []
    for mask, rhs in constraints.items():
        row = [Fraction(0)] * (nvars + 1)
        m = mask
        while m:
            low = m & -m
            row[col_of[low.bit_length() - 1]] = Fraction(1)
            m ^= low
        row[nvars] = rhs
        rows.append(row)

    pivot_cols: list[int] = []
    r = 0
    for c in range(nvars):
        pivot = next((i for i in range(r, len(rows)) if not _is_zero(rows[i][c], exact)), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not _is_zero(rows[i][c], exact):
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if not _is_zero(rows[i][nvars], exact):
            return None  # 0 = nonzero

    if len(pivot_cols) == nvars:
        solution = [Fraction(0)] * nvars
        for i, c in enumerate(pivot_cols):
            solution[c] = rows[i][nvars]
        if any(_is_neg(x, exact) for x in solution):
            return None
        return solution

    return _phase1_simplex([row[:] for row in rows[:r]], nvars, exact)


def _is_zero(x, exact: bool) -> bool:
    return x == 0 if exact else abs(x) <= EPS_LP


def _is_neg(x, exact: bool) -> bool:
    return x < 0 if exact else x < -EPS_LP


def _phase1_simplex(rows: list[list[Fraction]], nvars: int, exact: bool) -> list[Fraction] | None:
    """Minimize the sum of artificial variables; feasible iff the optimum is zero.

    ``rows`` is a reduced system [coeffs | rhs].  Bland's rule guarantees
    termination.  Returns the structural-variable part of an optimal basic
    solution when the artificial objective reaches zero.
    """
    m = len(rows)
    for row in rows:
        if _is_neg(row[nvars], exact):
            for idx in range(nvars + 1):
                row[idx] = -row[idx]

    ncols = nvars + m  # structural variables then artificials
    tableau = []
    for i, row in enumerate(rows):
        full = row[:nvars] + [Fraction(0)] * m + [row[nvars]]
        full[nvars + i] = Fraction(1)
        tableau.append(full)
    basis = [nvars + i for i in range(m)]

    # Objective row: minimize sum of artificials; expressed in reduced costs.
    obj = [Fraction(0)] * (ncols + 1)
    for row in tableau:
        for idx in range(ncols + 1):
            obj[idx] += row[idx]
    for i in range(m):
        obj[nvars + i] = Fraction(0)

    while True:
        enter = next(
            (j for j in range(ncols) if j not in basis and not _is_zero(obj[j], exact) and obj[j] > 0),
            None,
        )
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            coeff = tableau[i][enter]
            if _is_zero(coeff, exact) or coeff < 0:
                continue
            ratio = tableau[i][ncols] / coeff
            if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                best = ratio
                leave = i
        if leave is None:
            return None  # unbounded phase-1 cannot happen with rhs >= 0; treat as failure
        _pivot(tableau, obj, leave, enter, ncols)
        basis[leave] = enter

    if not _is_zero(obj[ncols], exact):
        return None
    solution = [Fraction(0)] * nvars
    for i, var in enumerate(basis):
        if var < nvars:
            solution[var] = tableau[i][ncols]
    if any(_is_neg(x, exact) for x in solution):
        return None
    return [x if x > 0 else Fraction(0) for x in solution]


def _pivot(tableau, obj, leave: int, enter: int, ncols: int) -> None:
    pivot_row = tableau[leave]
    pv = pivot_row[enter]
    tableau[leave] = [x / pv for x in pivot_row]
    pivot_row = tableau[leave]
    for i, row in enumerate(tableau):
        if i == leave:
            continue
        factor = row[enter]
        if factor != 0:
            tableau[i] = [x - factor * y for x, y in zip(row, pivot_row)]
    factor = obj[enter]
    if factor != 0:
        for idx in range(ncols + 1):
            obj[idx] -= factor * pivot_row[idx]
