import random
from fractions import Fraction
from itertools import combinations

import pytest

from cliquedecomp import LpProblem, infer_clique_weights, solve_feasibility, from_graph
from cliquedecomp.instance import WeightedGraph

from conftest import triangle211


def _feasible_by_enumeration(k, constraints):
    """Independent feasibility oracle: Gaussian elimination over every support.

    A nonempty set {x >= 0 : Ax = b} contains a basic feasible solution whose
    support columns are linearly independent, so checking every variable
    subset (solving exactly, rejecting rank-deficient supports) decides
    feasibility without any simplex machinery.
    """
    rows = [
        ([Fraction(1) if mask >> q & 1 else Fraction(0) for q in range(k)], Fraction(rhs))
        for mask, rhs in constraints
    ]
    for size in range(k + 1):
        for support in combinations(range(k), size):
            x = _solve_support(rows, support)
            if x is not None:
                return True
    return False


def _solve_support(rows, support):
    cols = list(support)
    m = [[row[c] for c in cols] + [rhs] for row, rhs in rows]
    width = len(cols)
    rank = 0
    pivots = []
    for c in range(width):
        pivot = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            return None  # dependent support; a smaller support covers this case
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][c]
        m[rank] = [x / pv for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        pivots.append(c)
        rank += 1
    for i in range(rank, len(m)):
        if m[i][width] != 0:
            return None
    solution = [Fraction(0)] * width
    for i, c in enumerate(pivots):
        solution[c] = m[i][width]
    if any(x < 0 for x in solution):
        return None
    return solution


def test_infer_triangle_example():
    A = from_graph(triangle211())
    rows = [0b11, 0b11, 0b01]
    gamma = infer_clique_weights(A, rows, 2)
    assert gamma == (Fraction(1), Fraction(1))


def test_infer_contradiction():
    g = WeightedGraph(3, [(0, 1, 2), (0, 2, 1), (1, 2, 1)])
    A = from_graph(g)
    rows = [0b01, 0b01, 0b01]
    assert infer_clique_weights(A, rows, 2) is None


def test_infer_single_unconstrained_row():
    A = from_graph(triangle211())
    rows = [0b11, None, None]
    assert infer_clique_weights(A, rows, 2) == (Fraction(0), Fraction(0))


def test_infer_uses_annotated_diagonal():
    A = from_graph(WeightedGraph(2, [(0, 1, 5)]), {0: 5})
    assert infer_clique_weights(A, [0b1, None], 1) == (Fraction(5),)
    # annotation 5 with an assigned empty signature is unsatisfiable
    assert infer_clique_weights(A, [0b0, None], 1) is None


def test_solve_single_binding():
    p = LpProblem(1, ((0b1, Fraction(5)),))
    assert solve_feasibility(p) == (Fraction(5),)


def test_solve_parallel_contradiction():
    p = LpProblem(2, ((0b11, Fraction(1)), (0b11, Fraction(2))))
    assert solve_feasibility(p) is None


def test_solve_substitution():
    p = LpProblem(2, ((0b11, Fraction(3)), (0b10, Fraction(1))))
    assert solve_feasibility(p) == (Fraction(2), Fraction(1))


def test_zero_mask_shortcircuit():
    p = LpProblem(2, ((0b00, Fraction(1)),))
    assert solve_feasibility(p) is None
    p0 = LpProblem(2, ((0b00, Fraction(0)),))
    assert solve_feasibility(p0) == (Fraction(0), Fraction(0))


def test_forced_zero_propagation():
    # x1 + x2 = 0 forces both to zero, making x2 = 3 impossible.
    p = LpProblem(2, ((0b11, Fraction(0)), (0b10, Fraction(3))))
    assert solve_feasibility(p) is None


def test_nonnegativity_blocks_signed_solutions():
    # x1 = 2 and x1 + x2 = 1 needs x2 = -1.
    p = LpProblem(2, ((0b01, Fraction(2)), (0b11, Fraction(1))))
    assert solve_feasibility(p) is None


def _random_problem(rng, k):
    n_cons = rng.randint(1, 6)
    cons = tuple(
        (rng.randint(0, (1 << k) - 1), Fraction(rng.randint(0, 5)))
        for _ in range(n_cons)
    )
    return LpProblem(k, cons)


def test_agreement_with_enumeration_oracle():
    rng = random.Random(20240601)
    checked = 0
    for _ in range(250):
        k = rng.randint(1, 4)
        p = _random_problem(rng, k)
        expected = _feasible_by_enumeration(k, p.constraints)
        gamma = solve_feasibility(p)
        assert (gamma is not None) == expected, p
        if gamma is not None:
            for mask, rhs in p.constraints:
                total = sum(gamma[q] for q in range(k) if mask >> q & 1)
                assert total == rhs
        checked += 1
    assert checked == 250


def test_duplicate_constraint_invariance():
    rng = random.Random(5)
    for _ in range(80):
        k = rng.randint(1, 4)
        p = _random_problem(rng, k)
        doubled = LpProblem(k, p.constraints + p.constraints[:1])
        assert (solve_feasibility(p) is None) == (solve_feasibility(doubled) is None)


def test_monotonicity_adding_constraints():
    rng = random.Random(6)
    for _ in range(80):
        k = rng.randint(1, 4)
        p = _random_problem(rng, k)
        if solve_feasibility(p) is not None:
            continue
        extra = (rng.randint(0, (1 << k) - 1), Fraction(rng.randint(0, 5)))
        assert solve_feasibility(LpProblem(k, p.constraints + (extra,))) is None


def test_float_mode_matches_rational_on_small_problems():
    rng = random.Random(9)
    for _ in range(60):
        k = rng.randint(1, 3)
        p = _random_problem(rng, k)
        exact = solve_feasibility(p, mode="rational")
        loose = solve_feasibility(p, mode="float")
        assert (exact is None) == (loose is None)


def test_problem_validation():
    with pytest.raises(ValueError):
        LpProblem(1, ((0b10, Fraction(1)),))
    with pytest.raises(ValueError):
        LpProblem(1, ((0b1, Fraction(-1)),))
