"""Realizable target degree vector and joint degree matrix.

Both targets start from rounded estimates and are then nudged one unit at a
time, always picking the entry whose relative error grows the least, until
they satisfy the realizability conditions and can hold the sampled
subgraph. Random tie-breaks draw from the caller's ``numpy`` generator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..crawl import SampledSubgraph
from ..estimate import LocalEstimates


def near_int(x: float) -> int:
    """Nearest integer; halves round away from zero."""
    return int(np.sign(x) * np.floor(abs(x) + 0.5))


def mu(k: int, kp: int) -> int:
    return 2 if k == kp else 1


# -- degree vector ------------------------------------------------------

@dataclass
class TargetDegreeVector:
    """``counts[k]`` is the target number of degree-``k`` nodes, ``k = 0..k_max``."""

    counts: np.ndarray
    n_hat_k: np.ndarray  # n_hat * P_hat(k); 0 where P_hat(k) == 0
    estimated: np.ndarray  # P_hat(k) > 0

    @property
    def k_max(self) -> int:
        return self.counts.shape[0] - 1

    def degree_sum(self) -> int:
        return int(np.dot(np.arange(self.counts.shape[0]), self.counts))

    def delta_plus(self, ks) -> np.ndarray:
        """Growth of the relative error of ``counts[k]`` when it is incremented."""
        ks = np.asarray(ks)
        est = self.n_hat_k[ks]
        cur = self.counts[ks]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            d = (np.abs(est - (cur + 1)) - np.abs(est - cur)) / est
        return np.where(self.estimated[ks], d, np.inf)

    def as_dict(self) -> dict:
        return {int(k): int(c) for k, c in enumerate(self.counts) if c}

    def copy(self) -> "TargetDegreeVector":
        return TargetDegreeVector(self.counts.copy(), self.n_hat_k, self.estimated)


def init_degree_vector(est: LocalEstimates, sub_max_degree: int = 0) -> TargetDegreeVector:
    k_est = max((k for k, p in est.p_k.items() if p > 0), default=0)
    k_max = max(k_est, int(sub_max_degree))
    counts = np.zeros(k_max + 1, dtype=np.int64)
    n_hat_k = np.zeros(k_max + 1)
    estimated = np.zeros(k_max + 1, dtype=bool)
    for k, p in est.p_k.items():
        if p > 0 and k >= 1:
            n_hat_k[k] = est.n_hat * p
            estimated[k] = True
            counts[k] = max(near_int(n_hat_k[k]), 1)
    return TargetDegreeVector(counts, n_hat_k, estimated)


def adjust_degree_vector(dv: TargetDegreeVector) -> TargetDegreeVector:
    """Make the degree sum even by incrementing one odd degree class."""
    if dv.degree_sum() % 2 == 0:
        return dv
    odd = np.arange(1, dv.k_max + 1, 2)
    # argmin returns the first minimum, i.e. the smallest degree on ties;
    # with no estimated odd degree every entry is inf and k = 1 is chosen
    k = int(odd[np.argmin(dv.delta_plus(odd))])
    dv.counts[k] += 1
    return dv


def modify_degree_vector(dv: TargetDegreeVector, sub: SampledSubgraph,
                         rng: np.random.Generator) -> tuple[TargetDegreeVector, dict]:
    """Assign target degrees to subgraph nodes and raise counts to cover them.

    Returns the updated vector and ``{label: target degree}``.
    """
    deg = sub.degree_map()
    assignment: dict[int, int] = {}
    placed = np.zeros(dv.k_max + 1, dtype=np.int64)  # n'(k)
    for u in sub.queried.tolist():
        assignment[u] = deg[u]
        placed[deg[u]] += 1
    np.maximum(dv.counts, placed, out=dv.counts)

    visible = sorted(sub.visible.tolist(), key=lambda u: (-deg[u], u))
    for u in visible:
        d = deg[u]
        if d > dv.k_max:
            raise AssertionError(f"visible node {u} has subgraph degree {d} > k*_max {dv.k_max}")
        room = dv.counts[d:] - placed[d:]
        total = int(room.sum())
        if total > 0:
            pick = int(rng.integers(total))
            k = d + int(np.searchsorted(np.cumsum(room), pick, side="right"))
        else:
            k = d + int(np.argmin(dv.delta_plus(np.arange(d, dv.k_max + 1))))
        assignment[u] = k
        placed[k] += 1
        if dv.counts[k] < placed[k]:
            dv.counts[k] = placed[k]
    if dv.degree_sum() % 2:
        adjust_degree_vector(dv)
    return dv, assignment


# -- joint degree matrix -------------------------------------------------

@dataclass
class TargetJDM:
    """Dense symmetric target over degree classes ``ks`` (ascending).

    ``m[a, b]`` is the target number of edges between degree ``ks[a]`` and
    degree ``ks[b]`` nodes.
    """

    ks: np.ndarray
    m: np.ndarray
    m_hat: np.ndarray
    estimated: np.ndarray
    m_min: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.m_min is None:
            self.m_min = np.zeros_like(self.m)
        self._index = {int(k): i for i, k in enumerate(self.ks)}

    def index(self, k: int) -> int:
        return self._index[k]

    def row_sums(self) -> np.ndarray:
        """``s(k) = sum_k' mu(k, k') m(k, k')`` per class."""
        return self.m.sum(axis=1) + np.diag(self.m)

    def get(self, k: int, kp: int) -> int:
        i, j = self._index.get(k), self._index.get(kp)
        if i is None or j is None:
            return 0
        return int(self.m[i, j])

    def as_dict(self) -> dict:
        out = {}
        for i, j in zip(*np.nonzero(self.m)):
            out[(int(self.ks[i]), int(self.ks[j]))] = int(self.m[i, j])
        return out

    def num_edges(self) -> int:
        return int((self.m.sum() + np.trace(self.m)) // 2)

    def copy(self) -> "TargetJDM":
        return TargetJDM(self.ks, self.m.copy(), self.m_hat, self.estimated, self.m_min.copy())

    def _delta(self, i: int, js: np.ndarray, step: int) -> np.ndarray:
        est = self.m_hat[i, js]
        cur = self.m[i, js]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            d = (np.abs(est - (cur + step)) - np.abs(est - cur)) / est
        return np.where(self.estimated[i, js], d, np.inf)

    def delta_plus(self, i, js):
        return self._delta(i, js, 1)

    def delta_minus(self, i, js):
        return self._delta(i, js, -1)

    def bump(self, i: int, j: int, step: int) -> None:
        self.m[i, j] += step
        if i != j:
            self.m[j, i] += step


def degree_classes(est: LocalEstimates, dv: TargetDegreeVector) -> np.ndarray:
    ks = {1}
    ks.update(int(k) for k in np.flatnonzero(dv.counts) if k >= 1)
    for k1, k2 in est.p_kk:
        ks.add(k1)
        ks.add(k2)
    return np.array(sorted(ks), dtype=np.int64)


def init_jdm(est: LocalEstimates, ks: np.ndarray) -> TargetJDM:
    K = ks.shape[0]
    idx = {int(k): i for i, k in enumerate(ks)}
    m = np.zeros((K, K), dtype=np.int64)
    m_hat = np.zeros((K, K))
    estimated = np.zeros((K, K), dtype=bool)
    scale = est.n_hat * est.k_avg_hat
    for (k1, k2), p in est.p_kk.items():
        if p <= 0:
            continue
        i, j = idx[k1], idx[k2]
        m_hat[i, j] = scale * p / mu(k1, k2)
        estimated[i, j] = True
        m[i, j] = max(near_int(m_hat[i, j]), 1)
    return TargetJDM(ks, m, m_hat, estimated)


def _pick_min(values: np.ndarray, rng: np.random.Generator) -> int:
    best = np.flatnonzero(values == values.min())
    if best.shape[0] == 1:
        return int(best[0])
    return int(best[rng.integers(best.shape[0])])


def adjust_jdm(jdm: TargetJDM, dv: TargetDegreeVector, rng: np.random.Generator,
               m_min: np.ndarray | None = None) -> tuple[TargetJDM, TargetDegreeVector]:
    """Drive every row sum ``s(k)`` to ``k * n*(k)``, editing only unprocessed rows.

    Rows are processed from the largest degree down; a row may only change
    entries whose column degree is in the working set and not larger than its
    own. May raise ``dv.counts`` when a row cannot be decreased any further.
    """
    if m_min is not None:
        jdm.m_min = m_min
    ks = jdm.ks
    s = jdm.row_sums()
    s_star = ks * dv.counts[ks]
    work = np.flatnonzero(s != s_star)
    one = jdm.index(1)
    if one not in work:
        work = np.sort(np.append(work, one))
    for pos in range(work.shape[0] - 1, -1, -1):
        i = int(work[pos])
        k = int(ks[i])
        lower = work[: pos + 1]  # classes in the working set with degree <= k
        if k == 1 and abs(int(s[i]) - int(s_star[i])) % 2:
            dv.counts[1] += 1
            s_star[i] = dv.counts[1]
        while s[i] != s_star[i]:
            if s[i] < s_star[i]:
                cand = lower if s[i] != s_star[i] - 1 else lower[:-1]
                j = int(cand[_pick_min(jdm.delta_plus(i, cand), rng)])
                jdm.bump(i, j, 1)
                s[i] += 1
                s[j] += 1
            else:
                cand = lower if s[i] != s_star[i] + 1 else lower[:-1]
                cand = cand[jdm.m[i, cand] > jdm.m_min[i, cand]]
                if cand.shape[0]:
                    j = int(cand[_pick_min(jdm.delta_minus(i, cand), rng)])
                    jdm.bump(i, j, -1)
                    s[i] -= 1
                    s[j] -= 1
                else:
                    dv.counts[k] += 2 if k == 1 else 1
                    s_star[i] = k * dv.counts[k]
    return jdm, dv


def subgraph_jdm(sub: SampledSubgraph, assignment: dict, ks: np.ndarray) -> np.ndarray:
    """``m'(k, k')``: subgraph edges counted under the endpoints' target degrees."""
    K = ks.shape[0]
    mp = np.zeros((K, K), dtype=np.int64)
    if sub.edges.size == 0:
        return mp
    labels = np.array(sorted(assignment), dtype=np.int64)
    target = np.array([assignment[u] for u in labels.tolist()], dtype=np.int64)
    d = target[np.searchsorted(labels, sub.edges)]
    ci = np.searchsorted(ks, d)
    if np.any(ks[ci] != d):
        raise ValueError("target degree missing from the degree classes")
    a, b = ci[:, 0], ci[:, 1]
    np.add.at(mp, (a, b), 1)
    off = a != b
    np.add.at(mp, (b[off], a[off]), 1)
    return mp


def modify_jdm(jdm: TargetJDM, m_sub: np.ndarray, dv: TargetDegreeVector,
               rng: np.random.Generator) -> tuple[TargetJDM, TargetDegreeVector]:
    """Raise entries below the subgraph's edge counts, compensating elsewhere.

    Each unit added to ``m(k1, k2)`` is offset by removing a unit from
    ``m(k1, k3)`` and ``m(k2, k4)`` (where those exceed the subgraph counts)
    and adding one to ``m(k3, k4)``, which keeps every row sum. Rows left
    unbalanced are repaired by a second adjustment pass with ``m'`` as floor.
    """
    K = jdm.ks.shape[0]
    allk = np.arange(K)
    for i, j in sorted(zip(*np.nonzero(np.triu(m_sub)))):
        i, j = int(i), int(j)
        while jdm.m[i, j] < m_sub[i, j]:
            jdm.bump(i, j, 1)
            found = []
            for a, excl in ((i, j), (j, i)):
                cand = allk[(jdm.m[a] > m_sub[a]) & (allk != a) & (allk != excl)]
                if cand.shape[0]:
                    c = int(cand[_pick_min(jdm.delta_minus(a, cand), rng)])
                    jdm.bump(a, c, -1)
                    found.append(c)
            if len(found) == 2:
                jdm.bump(found[0], found[1], 1)
    s_star = jdm.ks * dv.counts[jdm.ks]
    if np.any(jdm.row_sums() != s_star):
        adjust_jdm(jdm, dv, rng, m_min=m_sub.copy())
    return jdm, dv
