import random
from fractions import Fraction

import pytest

from cliquedecomp import (
    STAR,
    AnnotatedMatrix,
    InstanceError,
    WeightedGraph,
    compute_blocks,
    from_graph,
    rows_star_equal,
    star_equal,
)
from cliquedecomp.instance import as_weight

from conftest import complete, matrix, path3, random_graph, triangle211


def test_star_equal_basics():
    assert star_equal(Fraction(3), Fraction(3))
    assert star_equal(Fraction(3), STAR)
    assert star_equal(STAR, Fraction(3))
    assert star_equal(STAR, STAR)
    assert not star_equal(Fraction(3), Fraction(4))


def test_star_equal_tolerance():
    assert not star_equal(Fraction(1), Fraction(1) + Fraction(1, 10**12))
    assert star_equal(Fraction(1), Fraction(1) + Fraction(1, 10**12), tol=1e-9)


def test_as_weight_exact_parsing():
    assert as_weight("2.5") == Fraction(5, 2)
    assert as_weight("5/2") == Fraction(5, 2)
    assert as_weight(7) == Fraction(7)
    with pytest.raises(InstanceError):
        as_weight(0.1)
    with pytest.raises(InstanceError):
        as_weight("abc")
    with pytest.raises(InstanceError):
        as_weight(True)


def test_graph_validation():
    with pytest.raises(InstanceError):
        WeightedGraph(3, [(0, 0, 1)])
    with pytest.raises(InstanceError):
        WeightedGraph(3, [(0, 1, 1), (1, 0, 2)])
    with pytest.raises(InstanceError):
        WeightedGraph(3, [(0, 1, 0)])
    with pytest.raises(InstanceError):
        WeightedGraph(3, [(0, 1, -2)])
    with pytest.raises(InstanceError):
        WeightedGraph(2, [(0, 2, 1)])
    g = WeightedGraph(3, [(2, 0, 1)])
    assert g.edges == ((0, 2, Fraction(1)),)


def test_from_graph_triangle_all_wildcard_diagonal():
    A = matrix(WeightedGraph(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)]))
    for i in range(3):
        for j in range(3):
            if i == j:
                assert A.rows[i][j] is STAR
            else:
                assert A.rows[i][j] == 1


def test_from_graph_annotation_and_edge():
    A = from_graph(WeightedGraph(2, [(0, 1, 5)]), {0: 5})
    assert A.rows[0][1] == 5
    assert A.rows[0][0] == 5
    assert A.rows[1][1] is STAR


def test_from_graph_empty_graph():
    A = from_graph(WeightedGraph(2, []))
    assert A.rows[0][1] == 0 and A.rows[1][0] == 0
    assert A.rows[0][0] is STAR and A.rows[1][1] is STAR


def test_from_graph_rejects_bad_annotations():
    g = WeightedGraph(2, [(0, 1, 5)])
    with pytest.raises(InstanceError):
        from_graph(g, {5: 1})
    with pytest.raises(InstanceError):
        from_graph(g, {0: -1})


def test_matrix_validation():
    with pytest.raises(InstanceError):
        AnnotatedMatrix([[STAR, 1], [2, STAR]])  # asymmetric
    with pytest.raises(InstanceError):
        AnnotatedMatrix([[STAR, STAR], [STAR, STAR]])  # off-diagonal wildcard
    with pytest.raises(InstanceError):
        AnnotatedMatrix([[STAR, -1], [-1, STAR]])
    A = AnnotatedMatrix([[STAR, "2.5"], ["2.5", 3]])
    assert A.rows[0][1] == Fraction(5, 2)
    assert A.rows[1][1] == Fraction(3)


def test_rows_star_equal_triangle_uniform():
    A = matrix(WeightedGraph(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)]))
    assert rows_star_equal(A, 0, 1)


def test_rows_star_equal_path_ends_star_equal_but_not_twins():
    # Rows of the two path endpoints agree columnwise (wildcards absorb the
    # differing diagonal columns), yet the pair is non-adjacent, so
    # compute_blocks must still separate them.
    A = matrix(path3())
    assert rows_star_equal(A, 0, 2)
    assert not rows_star_equal(A, 0, 1)
    blocks = compute_blocks(A)
    assert blocks.block_of[0] != blocks.block_of[2]


def test_rows_star_equal_single_edge():
    A = matrix(WeightedGraph(2, [(0, 1, 5)]))
    assert rows_star_equal(A, 0, 1)


def test_rows_star_equal_rejects_equal_indices():
    A = matrix(path3())
    with pytest.raises(InstanceError):
        rows_star_equal(A, 1, 1)


def test_blocks_triangle_uniform():
    A = matrix(WeightedGraph(3, [(0, 1, 1), (0, 2, 1), (1, 2, 1)]))
    blocks = compute_blocks(A)
    assert blocks.blocks == ((0, 1, 2),)
    assert blocks.block_weight == (Fraction(1),)


def test_blocks_path_all_singletons():
    blocks = compute_blocks(matrix(path3()))
    assert blocks.blocks == ((0,), (1,), (2,))
    assert blocks.block_weight == (None, None, None)


def test_blocks_k5_uniform():
    blocks = compute_blocks(matrix(complete(5, 2)))
    assert blocks.blocks == ((0, 1, 2, 3, 4),)
    assert blocks.block_weight == (Fraction(2),)


def test_blocks_annotated_representative_consistency():
    # Annotated diagonal equal to the block weight keeps the vertex in the
    # block; a different annotation expels it.
    g = complete(3, 2)
    assert compute_blocks(from_graph(g, {0: 2})).blocks == ((0, 1, 2),)
    blocks = compute_blocks(from_graph(g, {0: 5}))
    assert blocks.block_of[0] != blocks.block_of[1]
    assert blocks.blocks == ((0,), (1, 2))


def test_blocks_properties_random():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(2, 9)
        g = random_graph(rng, n, density=rng.choice([0.3, 0.6, 0.9]), wmax=2)
        A = from_graph(g)
        blocks = compute_blocks(A)
        # partition: every vertex in exactly one block
        seen = sorted(v for blk in blocks.blocks for v in blk)
        assert seen == list(range(n))
        # symmetry of the twin test
        for u in range(n):
            for v in range(u + 1, n):
                assert rows_star_equal(A, u, v) == rows_star_equal(A, v, u)
        # internal uniformity
        for blk, w in zip(blocks.blocks, blocks.block_weight):
            for a in range(len(blk)):
                for b in range(a + 1, len(blk)):
                    assert A.rows[blk[a]][blk[b]] == w
        # determinism
        assert compute_blocks(A).blocks == blocks.blocks


def test_blocks_match_pairwise_definition():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(2, 8)
        g = random_graph(rng, n, density=0.7, wmax=2)
        A = from_graph(g)
        blocks = compute_blocks(A)
        for u in range(n):
            for v in range(u + 1, n):
                twins = A.has_edge(u, v) and rows_star_equal(A, u, v)
                same_block = blocks.block_of[u] == blocks.block_of[v]
                assert twins == same_block, (g.edges, u, v)


def test_matrix_permuted_roundtrip():
    A = matrix(triangle211())
    perm = [2, 0, 1]
    P = A.permuted(perm)
    for i in range(3):
        for j in range(3):
            assert P.rows[i][j] is A.rows[perm[i]][perm[j]] or P.rows[i][j] == A.rows[perm[i]][perm[j]]


def test_block_partition_permuted():
    A = matrix(complete(4, 3))
    blocks = compute_blocks(A)
    perm = [3, 1, 0, 2]
    moved = blocks.permuted(perm)
    assert moved.blocks == ((0, 1, 2, 3),)
    assert moved.block_weight == (Fraction(3),)
