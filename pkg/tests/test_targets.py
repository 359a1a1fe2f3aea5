import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graph_restore.crawl import SamplingList, bfs_crawl, induced_subgraph, random_walk
from graph_restore.estimate import LocalEstimates, estimate_all
from graph_restore.restore import targets as T
from graph_restore.restore.targets import (TargetDegreeVector, TargetJDM, adjust_degree_vector,
                                           adjust_jdm, degree_classes, init_degree_vector,
                                           init_jdm, modify_degree_vector, modify_jdm, near_int,
                                           subgraph_jdm)

from oracles import check_conditions, random_connected_simple


def est(n_hat=10.0, k_avg=2.0, p_k=None, p_kk=None):
    return LocalEstimates(n_hat=n_hat, k_avg_hat=k_avg, p_k=p_k or {}, p_kk=p_kk or {}, c_k={})


def dv_from(counts, n_hat_k=None):
    counts = np.array(counts, dtype=np.int64)
    n_hat_k = np.array(n_hat_k if n_hat_k is not None else counts, dtype=float)
    return TargetDegreeVector(counts, n_hat_k, n_hat_k > 0)


@pytest.mark.parametrize("x,expected", [(0.5, 1), (1.5, 2), (2.5, 3), (2.4999, 2), (-0.5, -1), (0.0, 0)])
def test_near_int_halves_away_from_zero(x, expected):
    assert near_int(x) == expected


def test_init_degree_vector_rounding():
    dv = init_degree_vector(est(10, p_k={1: 0.55, 2: 0.45}))
    assert dv.as_dict() == {1: 6, 2: 5}


def test_init_degree_vector_floor_one():
    dv = init_degree_vector(est(1, p_k={1: 0.1, 2: 0.9}))
    assert dv.counts[1] == 1


def test_init_degree_vector_subgraph_max():
    dv = init_degree_vector(est(10, p_k={1: 1.0}), sub_max_degree=7)
    assert dv.k_max == 7
    assert dv.as_dict() == {1: 10}


def test_adjust_degree_vector_even_unchanged():
    dv = dv_from([0, 1, 0, 1])
    assert adjust_degree_vector(dv).as_dict() == {1: 1, 3: 1}


def test_adjust_degree_vector_only_finite_odd():
    dv = dv_from([0, 1, 1, 0], n_hat_k=[0, 1.4, 1.0, 0.0])
    assert adjust_degree_vector(dv).as_dict() == {1: 2, 2: 1}


def test_adjust_degree_vector_tie_smallest_k():
    # both classes already sit at or above their estimate of 1, so growth is 1 for each
    dv = dv_from([0, 1, 0, 2, 0], n_hat_k=[0, 1.0, 0, 1.0, 0])
    adjust_degree_vector(dv)
    assert dv.as_dict() == {1: 2, 3: 2}


def test_adjust_degree_vector_no_estimated_odd():
    dv = dv_from([0, 0, 0, 1], n_hat_k=[0, 0, 0, 0])
    dv.estimated[:] = False
    adjust_degree_vector(dv)
    assert dv.counts[1] == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=2, max_size=8), st.lists(st.floats(0.0, 6.0), min_size=8, max_size=8))
def test_adjust_degree_vector_picks_argmin(counts, est_vals):
    counts = [0] + counts
    n_hat_k = [0.0] + est_vals[: len(counts) - 1]
    dv = dv_from(counts, n_hat_k)
    before = dv.counts.copy()
    adjust_degree_vector(dv)
    assert dv.degree_sum() % 2 == 0
    diff = dv.counts - before
    if before @ np.arange(len(before)) % 2 == 0:
        assert not diff.any()
        return
    (k,) = np.flatnonzero(diff)
    assert diff[k] == 1 and k % 2 == 1

    def growth(j):
        e = n_hat_k[j]
        with np.errstate(over="ignore"):
            return np.inf if e <= 0 else (abs(e - before[j] - 1) - abs(e - before[j])) / e

    odd = list(range(1, len(before), 2))
    best = min(growth(j) for j in odd)
    assert growth(k) == best
    assert k == min(j for j in odd if growth(j) == best)


def test_modify_degree_vector_fig1(fig1_graph):
    g = fig1_graph
    L = SamplingList([1, 3, 6, 3], [g.labels[g.neighbors(x - 1)] for x in [1, 3, 6, 3]])
    sub = induced_subgraph(L)
    dv = adjust_degree_vector(init_degree_vector(est(8, p_k={1: 0.25, 2: 0.5, 3: 0.125, 4: 0.125}), 4))
    dv, a = modify_degree_vector(dv, sub, np.random.default_rng(0))
    assert a[3] == 4 and a[1] == 1 and a[6] == 3
    assert a[2] >= 1
    sub_counts = {}
    for k in a.values():
        sub_counts[k] = sub_counts.get(k, 0) + 1
    assert check_conditions(dv.as_dict(), {}, sub_counts) == [
        f"JDM-3 s({k})=0 != {k * c}" for k, c in dv.as_dict().items()]


def test_modify_degree_vector_full_k3(k3):
    sub = induced_subgraph(bfs_crawl(k3, 0, 1.0))
    dv = init_degree_vector(est(2, p_k={2: 1.0}), 2)
    dv, a = modify_degree_vector(dv, sub, np.random.default_rng(0))
    assert a == {0: 2, 1: 2, 2: 2}
    assert dv.counts[2] >= 3


def test_modify_degree_vector_forced_fallback():
    # visible node 1 has subgraph degree 2 == k_max and no room left
    from graph_restore.crawl import SampledSubgraph
    sub = SampledSubgraph(np.array([0, 2]), np.array([1]), np.array([[0, 1], [1, 2]]))
    dv = dv_from([0, 2, 0])
    dv, a = modify_degree_vector(dv, sub, np.random.default_rng(0))
    assert a[1] == 2


def test_init_jdm_examples():
    e = est(3, 2, p_k={2: 1.0}, p_kk={(2, 2): 1.0})
    jdm = init_jdm(e, np.array([1, 2]))
    assert jdm.get(2, 2) == 3
    e = est(1, 1, p_k={1: 0.5, 2: 0.5}, p_kk={(1, 2): 0.3, (2, 1): 0.3, (3, 5): 0.2, (5, 3): 0.2})
    jdm = init_jdm(e, np.array([1, 2, 3, 5]))
    assert jdm.get(1, 2) == 1 == jdm.get(2, 1)
    assert jdm.get(3, 5) == jdm.get(5, 3)


def test_adjust_jdm_k3_unchanged():
    e = est(3, 2, p_k={2: 1.0}, p_kk={(2, 2): 1.0})
    dv = init_degree_vector(e)
    jdm, dv = adjust_jdm(init_jdm(e, degree_classes(e, dv)), dv, np.random.default_rng(0))
    assert jdm.as_dict() == {(2, 2): 3}
    assert dv.as_dict() == {2: 3}


def test_adjust_jdm_odd_degree_one_first():
    dv = dv_from([0, 1, 0])
    jdm = TargetJDM(np.array([1]), np.zeros((1, 1), dtype=np.int64), np.zeros((1, 1)), np.zeros((1, 1), bool))
    jdm, dv = adjust_jdm(jdm, dv, np.random.default_rng(0))
    assert dv.counts[1] == 2
    assert jdm.get(1, 1) == 1


def test_adjust_jdm_zero_start():
    dv = dv_from([0, 2, 1])
    ks = np.array([1, 2])
    jdm = TargetJDM(ks, np.zeros((2, 2), dtype=np.int64), np.zeros((2, 2)), np.zeros((2, 2), bool))
    jdm, dv = adjust_jdm(jdm, dv, np.random.default_rng(0))
    assert check_conditions(dv.as_dict(), jdm.as_dict()) == []


def _random_targets(seed):
    r = np.random.default_rng(seed)
    K = int(r.integers(1, 5))
    ks = np.unique(np.concatenate([[1], r.integers(1, 7, size=K)]))
    counts = np.zeros(ks.max() + 1, dtype=np.int64)
    counts[ks] = r.integers(0, 5, size=ks.shape[0])
    n_hat_k = counts + r.random(counts.shape[0])
    dv = TargetDegreeVector(counts, n_hat_k, counts > 0)
    adjust_degree_vector(dv)
    n = ks.shape[0]
    m_hat = r.random((n, n)) * 4
    m_hat = (m_hat + m_hat.T) / 2
    estimated = r.random((n, n)) < 0.7
    estimated = estimated & estimated.T
    m = np.where(estimated, np.maximum(np.floor(m_hat + 0.5), 1), 0).astype(np.int64)
    return TargetJDM(ks, m, m_hat, estimated), dv


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_adjust_jdm_replays_argmin_decisions(seed):
    """Every unit change is an argmin of the error growth over the allowed set."""
    jdm, dv = _random_targets(seed)
    ks = jdm.ks
    s = jdm.row_sums()
    work = set(np.flatnonzero(s != ks * dv.counts[ks]).tolist()) | {jdm.index(1)}
    log = []
    orig_bump = TargetJDM.bump

    def spy(self, i, j, step):
        row, col = (i, j) if ks[i] >= ks[j] else (j, i)
        m = self.m.copy()
        s_row = m[row].sum() + m[row, row]
        log.append((row, col, step, m, self.m_min.copy(), s_row, ks[row] * dv.counts[ks[row]]))
        orig_bump(self, i, j, step)

    TargetJDM.bump = spy
    try:
        out, dv = adjust_jdm(jdm, dv, np.random.default_rng(seed))
    finally:
        TargetJDM.bump = orig_bump
    assert check_conditions(dv.as_dict(), out.as_dict()) == []
    for row, col, step, m, m_min, s_row, s_star in log:
        assert abs(step) == 1
        assert step == (1 if s_row < s_star else -1)
        cand = [j for j in work if ks[j] <= ks[row]]
        if abs(s_row - s_star) == 1:
            cand = [j for j in cand if j != row]
        if step < 0:
            cand = [j for j in cand if m[row, j] > m_min[row, j]]

        def growth(j):
            e = out.m_hat[row, j]
            if not out.estimated[row, j]:
                return np.inf
            return (abs(e - (m[row, j] + step)) - abs(e - m[row, j])) / e

        assert col in cand
        assert growth(col) == min(growth(j) for j in cand)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_adjust_jdm_conditions_random(seed):
    jdm, dv = _random_targets(seed)
    jdm, dv = adjust_jdm(jdm, dv, np.random.default_rng(seed))
    assert check_conditions(dv.as_dict(), jdm.as_dict()) == []
    assert (jdm.m >= jdm.m_min).all()


def _jdm(ks, m):
    m = np.array(m, dtype=np.int64)
    return TargetJDM(np.array(ks), m, m.astype(float), m > 0)


def test_modify_jdm_no_violation_is_noop():
    dv = dv_from([0, 2, 1, 2])
    jdm = _jdm([1, 2, 3], [[0, 0, 2], [0, 0, 2], [2, 2, 1]])
    assert check_conditions(dv.as_dict(), jdm.as_dict()) == []
    before = jdm.m.copy()
    modify_jdm(jdm, np.zeros((3, 3), dtype=np.int64), dv, np.random.default_rng(0))
    assert np.array_equal(jdm.m, before)


def test_modify_jdm_raises_violated_entry():
    # one subgraph edge between degree-2 and degree-3 targets, m*(2, 3) = 0
    dv = dv_from([0, 2, 1, 2])
    jdm = _jdm([1, 2, 3], [[0, 2, 0], [2, 0, 0], [0, 0, 3]])
    assert check_conditions(dv.as_dict(), jdm.as_dict()) == []
    m_sub = np.zeros((3, 3), dtype=np.int64)
    m_sub[1, 2] = m_sub[2, 1] = 1
    jdm, dv = modify_jdm(jdm, m_sub, dv, np.random.default_rng(0))
    assert jdm.get(2, 3) >= 1
    assert check_conditions(dv.as_dict(), jdm.as_dict(), sub_jdm={(2, 3): 1, (3, 2): 1}) == []


def _pipeline_targets(g, frac, seed):
    L = random_walk(g, 0, frac, rng_seed=seed)
    e = estimate_all(L, M=0 if len(L) < 40 else None)
    sub = induced_subgraph(L)
    rng = np.random.default_rng(seed)
    dv = adjust_degree_vector(init_degree_vector(e, sub.graph().degrees.max()))
    dv, a = modify_degree_vector(dv, sub, rng)
    ks = degree_classes(e, dv)
    jdm, dv = adjust_jdm(init_jdm(e, ks), dv, rng)
    m_sub = subgraph_jdm(sub, a, ks)
    jdm, dv = modify_jdm(jdm, m_sub, dv, rng)
    return sub, a, dv, jdm, m_sub


def test_modify_jdm_random_30_node_graph():
    from graph_restore.estimate import InsufficientCollisionsError
    ok = 0
    for seed in range(30):
        g = random_connected_simple(np.random.default_rng(seed), 30, 0.12)
        try:
            sub, a, dv, jdm, m_sub = _pipeline_targets(g, 0.2, seed)
        except InsufficientCollisionsError:
            continue
        ok += 1
        sub_counts = {}
        for k in a.values():
            sub_counts[k] = sub_counts.get(k, 0) + 1
        ks = jdm.ks
        sub_jdm = {(int(ks[i]), int(ks[j])): int(m_sub[i, j]) for i, j in zip(*np.nonzero(m_sub))}
        assert check_conditions(dv.as_dict(), jdm.as_dict(), sub_counts, sub_jdm) == []
    assert ok >= 10
