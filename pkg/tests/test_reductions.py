import math

import numpy as np
import pytest

from conftest import all_graphs
from wlra import (Biclique, BipartiteGraph, CapacityError, DegenerateInputError, FactorPair, ParameterError,
                  WitnessParams, build_block_rank_r, build_md1d, build_w1d, lemma3_d, lemma6_d, md1d_witness,
                  penalty_value, rank_one_weight_reduce, rescale_theorem1, rescale_theorem2, wlra_objective)
from wlra.reductions import default_K, selector_blocks, witness_bound

MD_GOLDEN_M = np.array([
    [1, 0, 1, 0, 0],
    [0, 1, 1, 0, 0],
    [1, 1, 1, 0, 0],
    [0, 0, 0, 10, 0],
    [0, 0, 0, 0, 10],
], dtype=float)
MD_GOLDEN_W = np.array([
    [1, 1, 1, 1, 0],
    [1, 1, 1, 0, 1],
    [1, 1, 1, 0, 0],
    [0, 1, 0, 1, 0],
    [1, 0, 0, 0, 1],
], dtype=float)


def test_w1d_weights(g1):
    inst = build_w1d(g1, 50)
    np.testing.assert_array_equal(inst.W.values, [[1, 50, 1], [50, 1, 1], [1, 1, 1]])
    np.testing.assert_array_equal(inst.M, g1.biadjacency)
    with pytest.raises(ParameterError):
        build_w1d(g1, 0.5)
    with pytest.raises(CapacityError):
        build_w1d(g1, 1e200)


def test_thresholds():
    assert lemma3_d(7, 1) == 7_529_536
    assert lemma3_d(7, 0.5) == 7_529_536 * 16
    assert lemma6_d(7, 1) == pytest.approx(8 * 7**3.5 + math.sqrt(7))
    assert lemma6_d(7, 1) == pytest.approx(7262.587, abs=1e-3)
    with pytest.raises(ParameterError):
        lemma3_d(7, 0)
    with pytest.raises(ParameterError):
        lemma6_d(0, 1)


def test_md_golden_pattern(g1):
    inst = build_md1d(g1, 10)
    np.testing.assert_array_equal(inst.M, MD_GOLDEN_M)
    np.testing.assert_array_equal(inst.W.values, MD_GOLDEN_W)
    assert inst.zero_index == ((0, 1), (1, 0))
    assert inst.W.is_binary
    B1, B2 = selector_blocks(inst)
    assert B1.sum() == inst.Z and B2.sum() == inst.Z


def test_md_errors():
    with pytest.raises(DegenerateInputError):
        build_md1d(BipartiteGraph.complete(2, 2), 10)
    with pytest.raises(ParameterError):
        build_md1d(BipartiteGraph(np.eye(2)), 1.0)


def test_witness_value_d10_K2(g1):
    inst = build_md1d(g1, 10)
    F = md1d_witness(inst, Biclique([1, 2], [1, 2]), WitnessParams(2))
    assert wlra_objective(inst.M, inst.W, F) == pytest.approx(3.02, abs=1e-10)


def test_witness_identity_two_contributions():
    # both non-edges leak d^{2(1-K)}: one via u_d * v_j, one via u_i * v_d
    inst = build_md1d(BipartiteGraph(np.eye(2)), 100)
    F = md1d_witness(inst, Biclique([0], [0]), WitnessParams(3))
    assert wlra_objective(inst.M, inst.W, F) == pytest.approx(1 + 2 * 100.0**-4, abs=1e-14)


@pytest.mark.parametrize("side", ["use_v", "use_u"])
def test_witness_bound_all_3x3(side):
    for G in all_graphs(3, 3):
        if G.zero_count == 0 or G.edge_count == 0:
            continue
        inst = build_md1d(G, 1e3)
        from wlra import maximal_bicliques
        for B in maximal_bicliques(G):
            for K in (1.0, 1.5, 3.0):
                F = md1d_witness(inst, B, WitnessParams(K, side))
                obj = wlra_objective(inst.M, inst.W, F)
                assert obj <= witness_bound(inst, B.edge_count, K) * (1 + 1e-12)


def test_default_K_slack():
    d, Z = 1e4, 3
    K = default_K(d, Z)
    assert 2 * Z * d ** (2 * (1 - K)) == pytest.approx(1e-9, rel=1e-9)


def test_witness_rejects_non_biclique(g1):
    inst = build_md1d(g1, 10)
    with pytest.raises(ParameterError):
        md1d_witness(inst, Biclique([0, 1], [0]))
    with pytest.raises(ParameterError):
        WitnessParams(0.5)


def test_block_instance(g1):
    inst = build_block_rank_r(g1, 2, 1e3)
    assert inst.shape == (6, 6)
    np.testing.assert_array_equal(inst.M[:3, :3], g1.biadjacency)
    assert np.all(inst.M[:3, 3:] == 0)
    assert np.all(inst.W.values[:3, 3:] == 1e3)
    with pytest.raises(ParameterError):
        build_block_rank_r(g1, 0, 10)


def test_rank_one_weight_reduce_round_trip():
    rng = np.random.default_rng(2)
    M = rng.standard_normal((4, 3))
    s, t = rng.uniform(0.5, 2, 4), rng.uniform(0.5, 2, 3)
    red = rank_one_weight_reduce(M, s, t)
    u, v = rng.standard_normal(4), rng.standard_normal(3)
    # unweighted objective at (u', v') equals weighted objective at back_map(u', v')
    lhs = np.sum((red.Mprime - np.outer(u, v)) ** 2)
    rhs = wlra_objective(M, np.outer(s, t), red.back_map(u, v))
    assert lhs == pytest.approx(rhs, rel=1e-12)
    with pytest.raises(ParameterError):
        rank_one_weight_reduce(M, -s, t)


def test_penalty_identity_and_rescalings():
    rng = np.random.default_rng(9)
    for _ in range(50):
        G = BipartiteGraph((rng.random((3, 4)) < 0.5).astype(float))
        d = float(rng.uniform(1, 1e4))
        u, v = rng.standard_normal(3), rng.standard_normal(4)
        inst = build_w1d(G, d)
        f = wlra_objective(inst.M, inst.W, (u, v))
        P = penalty_value(G, d, u, v)
        assert abs(f - P) <= 1e-12 * (1 + P)
        small = rescale_theorem1(inst)
        assert wlra_objective(small.M, small.W, (u, v)) == pytest.approx(f / d, rel=1e-12)
        if G.zero_count:
            md = build_md1d(G, d + 1)
            uu, vv = rng.standard_normal(md.shape[0]), rng.standard_normal(md.shape[1])
            g = wlra_objective(md.M, md.W, (uu, vv))
            mds = rescale_theorem2(md)
            assert wlra_objective(mds.M, mds.W, (uu, vv / md.d)) == pytest.approx(g / md.d**2, rel=1e-12)


def test_split_blocks(g1):
    inst = build_md1d(g1, 10)
    ub, vb, ud, vd = inst.split(np.arange(5), np.arange(5) + 10)
    assert list(ub) == [0, 1, 2] and list(vd) == [13, 14]
