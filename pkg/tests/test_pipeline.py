from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from graph_restore.crawl import random_walk
from graph_restore.restore import RestoreConfig, gjoka_generate, restore, restore_from
from graph_restore.restore.pipeline import GJOKA

from oracles import (check_conditions, degree_vector_of, edge_multiset, jdm_of, long_walk,
                     naive_local, random_connected_simple)


def sub_jdm_dict(res) -> dict:
    out = {}
    ks = res.jdm.ks
    for a, b in zip(*np.nonzero(res.m_sub)):
        out[(int(ks[a]), int(ks[b]))] = int(res.m_sub[a, b])
    return out


def assert_realizes(g, res):
    assert degree_vector_of(g) == res.dv.as_dict()
    assert jdm_of(g) == res.jdm.as_dict()


def assert_contains_subgraph(g, sub):
    have = edge_multiset(g)
    want = Counter((min(a, b), max(a, b)) for a, b in sub.edges.tolist())
    for key, c in want.items():
        assert have[key] >= c, key


def triangles(g) -> float:
    return float(naive_local(g)["triangles"].sum() / 3)


@pytest.mark.parametrize("seed", range(10))
def test_full_crawl_k3_is_fixed_point(k3, seed):
    res = restore(random_walk(k3, seed % 3, 1.0, seed), RestoreConfig(rng_seed=seed))
    assert edge_multiset(res.graph) == edge_multiset(k3)


def test_long_full_crawl_ten_nodes_is_fixed_point():
    g = random_connected_simple(np.random.default_rng(1), 10, 0.3)
    for seed in range(5):
        res = restore(long_walk(g, 3000, seed), RestoreConfig(rng_seed=seed))
        out = res.graph
        assert degree_vector_of(out) == degree_vector_of(g)
        assert jdm_of(out) == jdm_of(g)
        assert triangles(out) == triangles(g)


def test_fifty_nodes_thirty_percent():
    rng = np.random.default_rng(21)
    g = random_connected_simple(rng, 50, 0.08)
    for seed in range(5):
        L = random_walk(g, int(rng.integers(50)), 0.3, seed)
        res = restore(L, RestoreConfig(rng_seed=seed, R_C=50))
        sub_counts = Counter(res.assignment.values())
        assert check_conditions(res.dv.as_dict(), res.jdm.as_dict(), sub_counts, sub_jdm_dict(res)) == []
        assert_realizes(res.constructed.to_multigraph(), res)
        assert_realizes(res.graph, res)
        assert_contains_subgraph(res.graph, res.subgraph)


def test_queried_degree_fidelity():
    rng = np.random.default_rng(2)
    g = random_connected_simple(rng, 60, 0.07)
    L = random_walk(g, 0, 0.25, 3)
    res = restore(L, RestoreConfig(rng_seed=3, R_C=20))
    out = res.graph
    deg_out = dict(zip(out.labels.tolist(), out.degrees.tolist()))
    deg_in = dict(zip(g.labels.tolist(), g.degrees.tolist()))
    for x in set(L.nodes.tolist()):
        assert deg_out[x] == deg_in[x]


def test_restore_is_deterministic():
    g = random_connected_simple(np.random.default_rng(4), 40, 0.1)
    L = random_walk(g, 0, 0.3, 1)
    a = restore(L, RestoreConfig(rng_seed=9, R_C=30)).graph
    b = restore(L, RestoreConfig(rng_seed=9, R_C=30)).graph
    assert np.array_equal(a.edges, b.edges) and np.array_equal(a.labels, b.labels)


def test_rewiring_lowers_clustering_distance():
    g = random_connected_simple(np.random.default_rng(5), 80, 0.06)
    res = restore(random_walk(g, 0, 0.3, 2), RestoreConfig(rng_seed=2, R_C=100))
    assert res.rewiring.d_final <= res.rewiring.d_initial
    assert res.rewiring.drift <= 1e-9


def test_gjoka_matches_flagged_restore_bit_for_bit():
    g = random_connected_simple(np.random.default_rng(6), 50, 0.08)
    L = random_walk(g, 0, 0.3, 4)
    cfg = RestoreConfig(rng_seed=13, R_C=40)
    a = gjoka_generate(L, cfg)
    b = restore_from(L, None, replace(cfg, **GJOKA))
    assert np.array_equal(a.graph.edges, b.graph.edges)
    assert np.array_equal(a.graph.labels, b.graph.labels)
    assert a.rewiring.accepted == b.rewiring.accepted


def test_gjoka_output_conditions():
    rng = np.random.default_rng(7)
    g = random_connected_simple(rng, 50, 0.08)
    for seed in range(5):
        res = gjoka_generate(random_walk(g, int(rng.integers(50)), 0.3, seed), RestoreConfig(rng_seed=seed, R_C=20))
        assert res.subgraph is None and res.assignment == {}
        assert check_conditions(res.dv.as_dict(), res.jdm.as_dict()) == []
        assert_realizes(res.graph, res)
        assert res.rewiring.candidates == res.graph.m


def test_gjoka_k3_is_two_regular(k3):
    res = gjoka_generate(random_walk(k3, 0, 1.0, 0), RestoreConfig(rng_seed=0))
    assert set(res.graph.degrees.tolist()) == {2}


def test_protected_edges_equal_subgraph():
    g = random_connected_simple(np.random.default_rng(8), 40, 0.1)
    res = restore(random_walk(g, 0, 0.3, 5), RestoreConfig(rng_seed=5, R_C=10))
    prot = res.constructed.protected_edges()
    labels = res.constructed.labels
    got = Counter(tuple(sorted(p)) for p in labels[prot].tolist())
    want = Counter((min(a, b), max(a, b)) for a, b in res.subgraph.edges.tolist())
    assert got == want

