from itertools import combinations

import numpy as np
import pytest

from conftest import all_graphs
from wlra import (Biclique, BipartiteGraph, CapacityError, ConstraintError, ParameterError,
                  brute_force_max_biclique, max_edge_biclique, maximal_bicliques)
from wlra.biclique import MAX_ORACLE_SIDE, mbp_objective


def maximal_by_definition(G):
    B = G.biadjacency.astype(bool)
    out = set()
    for a in range(1, G.s + 1):
        for R in combinations(range(G.s), a):
            C = tuple(np.flatnonzero(B[list(R)].all(axis=0)))
            if not C:
                continue
            closure = tuple(np.flatnonzero(B[:, list(C)].all(axis=1)))
            if closure == R:
                out.add(Biclique(R, C))
    return sorted(out)


def test_seven_edge_graph(g1):
    best, p = max_edge_biclique(g1)
    assert best.edge_count == 4 and p == 3
    assert best.label() == "{s1,s3}x{t1,t3}"
    labels = [B.label() for B in maximal_bicliques(g1)]
    assert labels == ["{s1,s2,s3}x{t3}", "{s1,s3}x{t1,t3}", "{s2,s3}x{t2,t3}", "{s3}x{t1,t2,t3}"]


def test_complete_and_identity():
    best, p = max_edge_biclique(BipartiteGraph.complete(3, 4))
    assert best.edge_count == 12 and p == 0
    best, p = max_edge_biclique(BipartiteGraph(np.eye(3)))
    assert best.edge_count == 1 and p == 2
    assert best == Biclique([0], [0])  # lexicographic tie-break


def test_empty_graph():
    best, p = max_edge_biclique(BipartiteGraph(np.zeros((2, 3))))
    assert best.is_empty and p == 0
    assert maximal_bicliques(BipartiteGraph(np.zeros((2, 3)))) == []


@pytest.mark.parametrize("shape", [(1, 1), (1, 4), (2, 2), (2, 3), (3, 2), (3, 3), (2, 5)])
def test_exhaustive_small_shapes(shape):
    for G in all_graphs(*shape):
        best, p = max_edge_biclique(G)
        assert best.is_valid(G)
        assert best.edge_count == brute_force_max_biclique(G)
        assert p == G.edge_count - best.edge_count


def test_exhaustive_3x4_against_brute_force():
    for G in all_graphs(3, 4):
        assert max_edge_biclique(G)[0].edge_count == brute_force_max_biclique(G)


@pytest.mark.parametrize("shape", [(2, 3), (3, 3), (3, 2)])
def test_maximal_list_exhaustive(shape):
    for G in all_graphs(*shape):
        assert maximal_bicliques(G) == maximal_by_definition(G)


def test_wide_graph_uses_smaller_side():
    rng = np.random.default_rng(5)
    B = (rng.random((3, 40)) < 0.6).astype(float)
    G = BipartiteGraph(B)
    assert max_edge_biclique(G)[0].edge_count == brute_force_max_biclique(G)


def test_capacity():
    G = BipartiteGraph(np.ones((MAX_ORACLE_SIDE + 1, MAX_ORACLE_SIDE + 1)))
    with pytest.raises(CapacityError):
        max_edge_biclique(G)


def test_graph_validation():
    with pytest.raises(ParameterError):
        BipartiteGraph([[0, 2]])
    with pytest.raises(ParameterError):
        BipartiteGraph.from_edges(2, 2, [(0, 0), (0, 0)])
    with pytest.raises(ParameterError):
        BipartiteGraph.from_edges(2, 2, [(2, 0)])
    G = BipartiteGraph.from_edges(2, 3, [(1, 2), (0, 0)])
    assert G.edges() == [(0, 0), (1, 2)]
    assert G.zero_entries()[:2] == [(0, 1), (0, 2)]


def test_mbp_objective(g1):
    assert mbp_objective(g1, Biclique([1, 2], [1, 2])) == 3
    with pytest.raises(ConstraintError):
        mbp_objective(g1, Biclique([0, 1], [0]))


def test_biclique_serialisation():
    B = Biclique([2, 0], [1])
    assert B.rows == (0, 2)
    assert B.to_dict() == {"rows": [1, 3], "cols": [2], "edges": 2}
    u, v = B.indicators(3, 2)
    np.testing.assert_array_equal(u, [1, 0, 1])
    np.testing.assert_array_equal(v, [0, 1])
