"""Half-edge construction of a graph around the sampled subgraph."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..crawl import SampledSubgraph
from ..graph_core import Multigraph
from .targets import TargetDegreeVector, TargetJDM


class ConstructionError(RuntimeError):
    """Free half-edges ran out: the targets violate a realizability condition."""


@dataclass
class StubGraph:
    """Graph as a perfect matching of half-edges.

    Node ``v`` owns stubs ``offs[v]:offs[v+1]``; ``partner[s]`` is the stub
    that ``s`` is joined to. ``protected[s]`` marks stubs of subgraph edges.
    Degrees never change once built, which is what rewiring relies on.
    """

    offs: np.ndarray
    owner: np.ndarray
    partner: np.ndarray
    protected: np.ndarray
    labels: np.ndarray

    @property
    def n(self) -> int:
        return self.offs.shape[0] - 1

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offs)

    def edges(self) -> np.ndarray:
        s = np.arange(self.partner.shape[0])
        keep = s < self.partner
        return np.stack([self.owner[s[keep]], self.owner[self.partner[keep]]], axis=1)

    def protected_edges(self) -> np.ndarray:
        s = np.arange(self.partner.shape[0])
        keep = (s < self.partner) & self.protected
        return np.stack([self.owner[s[keep]], self.owner[self.partner[keep]]], axis=1)

    def to_multigraph(self) -> Multigraph:
        return Multigraph(self.n, self.edges(), self.labels)

    def copy(self) -> "StubGraph":
        return StubGraph(self.offs, self.owner, self.partner.copy(), self.protected, self.labels)


def construct_graph(sub: SampledSubgraph | None, dv: TargetDegreeVector, assignment: dict,
                    jdm: TargetJDM, m_sub: np.ndarray | None,
                    rng: np.random.Generator) -> StubGraph:
    """Add nodes and edges to the subgraph until it realizes both targets.

    Subgraph nodes keep their labels and come first; added nodes get fresh
    labels above the largest subgraph label. Free half-edges of each degree
    class are drawn without replacement in uniformly random order, which is
    the same law as picking a uniformly random free half-edge per step.
    """
    if sub is not None and sub.edges.size:
        sg = sub.graph()
        sub_labels = sg.labels
        sub_deg = sg.degrees
        sub_edges = sg.edges
    else:
        sub_labels = np.zeros(0, dtype=np.int64)
        sub_deg = np.zeros(0, dtype=np.int64)
        sub_edges = np.zeros((0, 2), dtype=np.int64)
    n_sub = sub_labels.shape[0]
    sub_target = np.array([assignment[u] for u in sub_labels.tolist()], dtype=np.int64)

    placed = np.bincount(sub_target, minlength=dv.k_max + 1)[: dv.k_max + 1]
    residual = dv.counts - placed
    if np.any(residual < 0):
        raise ConstructionError("degree vector smaller than the subgraph's target degrees")
    added = np.repeat(np.arange(dv.k_max + 1), residual)
    rng.shuffle(added)
    target = np.concatenate([sub_target, added])
    n = target.shape[0]
    start = int(sub_labels.max()) + 1 if n_sub else 0
    labels = np.concatenate([sub_labels, np.arange(start, start + added.shape[0])])

    offs = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(target, out=offs[1:])
    nstub = int(offs[-1])
    owner = np.repeat(np.arange(n), target)
    partner = np.full(nstub, -1, dtype=np.int64)
    protected = np.zeros(nstub, dtype=bool)

    # subgraph edges occupy the first d' stubs of each subgraph node
    nxt = offs[:-1].copy()
    for u, v in sub_edges.tolist():
        su = nxt[u]
        nxt[u] += 1
        sv = nxt[v]
        nxt[v] += 1
        partner[su] = sv
        partner[sv] = su
    protected[partner >= 0] = True
    if n_sub and np.any(nxt[:n_sub] - offs[:n_sub] != sub_deg):
        raise ConstructionError("subgraph degree exceeds target degree")

    free = np.flatnonzero(partner < 0)
    free_class = target[owner[free]]
    pools = {}
    for k in np.unique(free_class):
        pool = free[free_class == k]
        rng.shuffle(pool)
        pools[int(k)] = [pool, 0]

    def take(k, c):
        entry = pools.get(k)
        if entry is None or entry[1] + c > entry[0].shape[0]:
            raise ConstructionError(f"ran out of free half-edges in degree class {k}")
        out = entry[0][entry[1]: entry[1] + c]
        entry[1] += c
        return out

    need = jdm.m - (m_sub if m_sub is not None else 0)
    if np.any(need < 0):
        raise ConstructionError("target JDM below the subgraph's edge counts")
    ks = jdm.ks
    for a, b in zip(*np.nonzero(np.triu(need))):
        c = int(need[a, b])
        k1, k2 = int(ks[a]), int(ks[b])
        if a == b:
            both = take(k1, 2 * c)
            x, y = both[0::2], both[1::2]
        else:
            x, y = take(k1, c), take(k2, c)
        partner[x] = y
        partner[y] = x
    if np.any(partner < 0):
        raise ConstructionError("unmatched half-edges left after construction")
    return StubGraph(offs, owner, partner, protected, labels)
