"""Crawlers under the restricted query model and the sampled subgraph.

Querying a node reveals its full incident-endpoint multiset. Every crawler
records one ``(node, neighbors)`` entry per query and stops as soon as the
number of *distinct* queried nodes reaches ``ceil(fraction * n)``. Recorded
ids are the graph's labels, so a sampling list can be restored without the
original graph at hand.
"""
from __future__ import annotations

import math
import os
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph_core import Multigraph


@dataclass
class SamplingList:
    """Ordered crawl record: ``nodes[i]`` was queried and returned ``neighbors[i]``."""

    nodes: np.ndarray
    neighbors: list

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=np.int64)
        if len(self.neighbors) != self.nodes.shape[0]:
            raise ValueError("one neighbor list is required per sampled node")

    def __len__(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(nb) for nb in self.neighbors), dtype=np.int64, count=len(self))

    def distinct(self) -> dict[int, np.ndarray]:
        """Queried node -> neighbor multiset (first record wins; the graph is static)."""
        out: dict[int, np.ndarray] = {}
        for x, nb in zip(self.nodes.tolist(), self.neighbors):
            out.setdefault(x, nb)
        return out

    def write(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for x, nb in zip(self.nodes.tolist(), self.neighbors):
                fh.write(f"{x} : {' '.join(map(str, np.asarray(nb).tolist()))}\n")
        os.replace(tmp, path)

    @classmethod
    def read(cls, path) -> "SamplingList":
        nodes, neighbors = [], []
        cache: dict[int, np.ndarray] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip() or line.startswith("#"):
                    continue
                head, sep, tail = line.partition(":")
                if not sep:
                    raise ValueError(f"{path}:{lineno}: missing ':' separator")
                x = int(head)
                if x not in cache:
                    cache[x] = np.array(tail.split(), dtype=np.int64)
                nodes.append(x)
                neighbors.append(cache[x])
        return cls(np.array(nodes, dtype=np.int64), neighbors)


@dataclass
class SampledSubgraph:
    """Edge-induced subgraph of a crawl, in label space."""

    queried: np.ndarray
    visible: np.ndarray
    edges: np.ndarray  # (m', 2) labels, multi-edges repeated
    _graph: Multigraph = field(default=None, repr=False)

    @property
    def nodes(self) -> np.ndarray:
        return np.union1d(self.queried, self.visible)

    def graph(self) -> Multigraph:
        """Dense view; node ``i`` has label ``graph.labels[i]`` (labels sorted)."""
        if self._graph is None:
            labels = self.nodes
            dense = np.searchsorted(labels, self.edges) if self.edges.size else self.edges
            self._graph = Multigraph(labels.shape[0], dense, labels)
        return self._graph

    def degree_map(self) -> dict[int, int]:
        g = self.graph()
        return dict(zip(g.labels.tolist(), g.degrees.tolist()))


def budget_nodes(fraction: float, n: int) -> int:
    if not 0 < fraction <= 1:
        raise ValueError("queried fraction must lie in (0, 1]")
    # round first so that e.g. 0.3 * 10 does not become 4
    return max(1, math.ceil(round(fraction * n, 9)))


def _check_seed(g: Multigraph, seed_node: int) -> None:
    if not 0 <= seed_node < g.n:
        raise IndexError(f"seed node {seed_node} out of range")
    if g.degrees[seed_node] == 0:
        raise ValueError(f"seed node {seed_node} has degree 0")


def _record(g: Multigraph, x: int, nodes: list, neighbors: list, cache: dict) -> None:
    nb = cache.get(x)
    if nb is None:
        nb = g.labels[g.neighbors(x)]
        cache[x] = nb
    nodes.append(int(g.labels[x]))
    neighbors.append(nb)


def random_walk(g: Multigraph, seed_node: int, fraction: float, rng_seed=None) -> SamplingList:
    """Simple random walk: each step follows a uniformly chosen incident edge."""
    _check_seed(g, seed_node)
    target = budget_nodes(fraction, g.n)
    rng = np.random.default_rng(rng_seed)
    nodes: list = []
    neighbors: list = []
    cache: dict = {}
    seen = set()
    x = int(seed_node)
    uniforms = rng.random(4096)
    pos = 0
    while True:
        _record(g, x, nodes, neighbors, cache)
        seen.add(x)
        if len(seen) >= target:
            break
        if pos == uniforms.shape[0]:
            uniforms = rng.random(4096)
            pos = 0
        row = g.neighbors(x)
        x = int(row[int(uniforms[pos] * row.shape[0])])
        pos += 1
    return SamplingList(np.array(nodes, dtype=np.int64), neighbors)


def _unvisited(g: Multigraph, x: int, visited: np.ndarray) -> np.ndarray:
    row = np.unique(g.neighbors(x))
    return row[~visited[row]]


def _frontier_crawl(g, seed_node, fraction, choose) -> SamplingList:
    """FIFO crawl where ``choose(candidates)`` picks which unvisited neighbors to enqueue."""
    _check_seed(g, seed_node)
    target = budget_nodes(fraction, g.n)
    nodes: list = []
    neighbors: list = []
    cache: dict = {}
    queried: list[int] = []
    visited = np.zeros(g.n, dtype=bool)  # queried or enqueued
    queue = deque([int(seed_node)])
    visited[seed_node] = True
    while True:
        x = queue.popleft()
        _record(g, x, nodes, neighbors, cache)
        queried.append(x)
        if len(queried) >= target:
            break
        picked = choose(_unvisited(g, x, visited), False)
        visited[picked] = True
        queue.extend(picked.tolist())
        if not queue:
            picked = _revive(g, queried, visited, choose)
            visited[picked] = True
            queue.extend(picked.tolist())
    return SamplingList(np.array(nodes, dtype=np.int64), neighbors)


def _revive(g, queried, visited, choose) -> np.ndarray:
    # a revived node must still have somewhere to go; the graph is connected
    # and the budget is not met, so at least one queried node qualifies
    rng = choose.rng
    for _ in range(64):
        x = queried[int(rng.integers(len(queried)))]
        cand = _unvisited(g, x, visited)
        if cand.size:
            return choose(cand, True)
    live = [x for x in queried if _unvisited(g, x, visited).size]
    if not live:
        raise RuntimeError("crawl frontier exhausted: graph is not connected")
    x = live[int(rng.integers(len(live)))]
    return choose(_unvisited(g, x, visited), True)


class _BFSChoice:
    rng = None

    def __init__(self, rng_seed=0):
        self.rng = np.random.default_rng(rng_seed)

    def __call__(self, cand, reviving):
        return cand  # already ascending


class _SnowballChoice(_BFSChoice):
    def __init__(self, k, rng_seed):
        super().__init__(rng_seed)
        self.k = k

    def __call__(self, cand, reviving):
        if cand.shape[0] <= self.k:
            return cand
        return np.sort(self.rng.choice(cand, size=self.k, replace=False))


class _FireChoice(_BFSChoice):
    def __init__(self, p_f, rng_seed):
        super().__init__(rng_seed)
        self.p_f = p_f

    def __call__(self, cand, reviving):
        c = int(self.rng.geometric(1.0 - self.p_f)) - 1
        if reviving:
            c = max(c, 1)
        c = min(c, cand.shape[0])
        return self.rng.choice(cand, size=c, replace=False) if c else cand[:0]


def bfs_crawl(g: Multigraph, seed_node: int, fraction: float) -> SamplingList:
    """Breadth-first crawl; neighbors are enqueued in ascending id order."""
    return _frontier_crawl(g, seed_node, fraction, _BFSChoice())


def snowball_crawl(g: Multigraph, seed_node: int, fraction: float, k: int = 50, rng_seed=None) -> SamplingList:
    """BFS that enqueues at most ``k`` uniformly chosen unvisited neighbors per query."""
    if k < 1:
        raise ValueError("snowball k must be >= 1")
    return _frontier_crawl(g, seed_node, fraction, _SnowballChoice(k, rng_seed))


def geometric_burn_count(rng: np.random.Generator, p_f: float, size=None):
    """Draws from the geometric law on {0, 1, ...} with mean ``p_f / (1 - p_f)``."""
    return rng.geometric(1.0 - p_f, size=size) - 1


def forest_fire_crawl(g: Multigraph, seed_node: int, fraction: float, p_f: float = 0.7, rng_seed=None) -> SamplingList:
    """Forest fire crawl; dies out are revived from a random queried node."""
    if not 0 <= p_f < 1:
        raise ValueError("p_f must lie in [0, 1)")
    return _frontier_crawl(g, seed_node, fraction, _FireChoice(p_f, rng_seed))


def induced_subgraph(L: SamplingList) -> SampledSubgraph:
    """Union of the queried nodes' incident edges, each original edge kept once."""
    if len(L) == 0:
        raise ValueError("empty sampling list")
    table = L.distinct()
    queried = np.array(sorted(table), dtype=np.int64)
    qset = set(table)
    edges = []
    for u, nb in table.items():
        for v, c in Counter(nb.tolist()).items():
            if v == u:
                edges.extend([(u, u)] * (c // 2))
            elif v in qset and v < u:
                continue  # recorded from v's side
            else:
                edges.extend([(u, v)] * c)
    edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
    visible = np.setdiff1d(np.unique(edges), queried)
    return SampledSubgraph(queried, visible, edges)
