import random
from fractions import Fraction

import pytest

from cliquedecomp import (
    OracleSizeError,
    WeightedGraph,
    brute_force_decide,
    from_graph,
    minimal_k,
    verify,
)

from conftest import matrix, path3, random_graph, triangle211


def test_verify_uniform_triangle():
    A = matrix(WeightedGraph(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)]))
    assert verify(A, [0b1, 0b1, 0b1], [Fraction(1)]).ok


def test_verify_triangle211_solution():
    A = matrix(triangle211())
    report = verify(A, [0b11, 0b11, 0b01], [Fraction(1), Fraction(1)])
    assert report.ok


def test_verify_reports_first_violation():
    A = matrix(triangle211())
    report = verify(A, [0b11, 0b11, 0b01], [Fraction(1), Fraction(2)])
    assert not report.ok
    i, j, lhs, rhs = report.first_violation
    assert (i, j) == (0, 1)
    assert lhs == Fraction(3) and rhs == Fraction(2)


def test_verify_respects_annotations():
    A = from_graph(WeightedGraph(2, [(0, 1, 5)]), {0: 5})
    assert verify(A, [0b1, 0b1], [Fraction(5)]).ok
    A_bad = from_graph(WeightedGraph(2, [(0, 1, 5)]), {0: 7})
    report = verify(A_bad, [0b1, 0b1], [Fraction(5)])
    assert not report.ok and report.first_violation[:2] == (0, 0)


def test_verify_dimension_mismatch():
    A = matrix(path3())
    with pytest.raises(ValueError):
        verify(A, [0b1, 0b1], [Fraction(1)])


def test_brute_force_single_edge():
    A = matrix(WeightedGraph(2, [(0, 1, 5)]))
    sol = brute_force_decide(A, 1)
    assert sol is not None
    assert sol.cliques == ((frozenset({0, 1}), Fraction(5)),)


def test_brute_force_path_k1_no():
    assert brute_force_decide(matrix(path3()), 1) is None


def test_brute_force_triangle211():
    A = matrix(triangle211())
    assert brute_force_decide(A, 1) is None
    sol = brute_force_decide(A, 2)
    assert sol is not None
    assert verify(A, sol.B, sol.gamma).ok


def test_brute_force_annotated_kernel_instance():
    # Single annotated vertex of weight 2: only a clique through it works.
    A = from_graph(WeightedGraph(1, []), {0: 2})
    sol = brute_force_decide(A, 1)
    assert sol is not None and sol.gamma == (Fraction(2),)
    A0 = from_graph(WeightedGraph(1, []), {0: 0})
    sol0 = brute_force_decide(A0, 1)
    assert sol0 is not None


def test_minimal_k_examples():
    assert minimal_k(matrix(WeightedGraph(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)])), 3) == 1
    assert minimal_k(matrix(triangle211()), 3) == 2
    assert minimal_k(matrix(path3()), 3) == 2


def test_minimal_k_sentinel():
    # K4 with distinct weights on a perfect matching pattern needs many cliques.
    g = WeightedGraph(4, [(0, 1, 1), (0, 2, 2), (0, 3, 4), (1, 2, 8), (1, 3, 16), (2, 3, 32)])
    assert minimal_k(from_graph(g), 2) == 3  # sentinel: > k_cap


def test_monotonicity_in_k():
    rng = random.Random(3)
    for _ in range(25):
        g = random_graph(rng, rng.randint(2, 6), density=0.6)
        A = from_graph(g)
        answers = [brute_force_decide(A, k) is not None for k in (1, 2, 3)]
        for lo, hi in zip(answers, answers[1:]):
            assert not (lo and not hi)


def test_size_guard():
    g = random_graph(random.Random(0), 11, density=0.5)
    with pytest.raises(OracleSizeError):
        brute_force_decide(from_graph(g), 1)
    with pytest.raises(OracleSizeError):
        brute_force_decide(matrix(path3()), 4)
    with pytest.raises(OracleSizeError):
        minimal_k(matrix(path3()), 4)
    # explicit overrides widen the guard
    assert brute_force_decide(from_graph(g), 1, max_n=11) is None
