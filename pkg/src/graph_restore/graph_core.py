"""Undirected multigraph storage, edge-list I/O and dataset preprocessing.

Nodes are dense integers ``0..n-1``. Each node's incident endpoints are kept
in a CSR layout with sorted rows, so a self-loop puts the node's own id twice
into its row. This gives ``A[i, i] == 2 * loops`` and keeps the handshake
lemma intact.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


class GraphFormatError(ValueError):
    """Raised for a malformed edge-list line."""

    def __init__(self, path, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: expected two non-negative integers, got {line!r}")
        self.path = path
        self.lineno = lineno


class Multigraph:
    """Immutable undirected multigraph (multi-edges and loops allowed).

    ``edges`` is an ``(m, 2)`` int64 array; orientation of a row is irrelevant.
    ``labels[i]`` is the external id of node ``i`` (defaults to ``i``).
    """

    __slots__ = ("n", "edges", "labels", "indptr", "indices", "_degrees")

    def __init__(self, n: int, edges, labels=None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n < 0:
            raise ValueError("negative node count")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        self.n = int(n)
        self.edges = edges
        self.edges.flags.writeable = False
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (n,):
            raise ValueError("labels must have one entry per node")
        self.labels = labels
        self.labels.flags.writeable = False

        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        self.indices = dst[order]
        counts = np.bincount(src, minlength=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self._degrees = counts.astype(np.int64)
        for arr in (self.indices, self.indptr, self._degrees):
            arr.flags.writeable = False

    # -- basic queries -------------------------------------------------
    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"node {i} out of range for graph with {self.n} nodes")

    def degree(self, i: int) -> int:
        self._check(i)
        return int(self._degrees[i])

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted incident-endpoint multiset of ``i`` (read-only view)."""
        self._check(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def multiplicity(self, i: int, j: int) -> int:
        """``A[i, j]``: number of i-j edges, or twice the loop count if i == j."""
        self._check(i)
        self._check(j)
        if self._degrees[i] > self._degrees[j]:
            i, j = j, i
        row = self.neighbors(i)
        return int(np.searchsorted(row, j, side="right") - np.searchsorted(row, j, side="left"))

    def edge_multiset(self) -> dict[tuple[int, int], int]:
        """Edges as ``{(min_label, max_label): count}``."""
        lab = self.labels[self.edges]
        lo = np.minimum(lab[:, 0], lab[:, 1])
        hi = np.maximum(lab[:, 0], lab[:, 1])
        pairs, counts = np.unique(np.stack([lo, hi], axis=1), axis=0, return_counts=True)
        return {(int(a), int(b)): int(c) for (a, b), c in zip(pairs, counts)}

    def adjacency_matrix(self, dtype=np.float64):
        """Sparse ``A`` with the loop convention ``A[i, i] = 2 * loops``."""
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(src.shape[0], dtype=dtype)
        return coo_matrix((data, (src, dst)), shape=(self.n, self.n)).tocsr()

    def simple_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of the simple graph underlying this one (loops dropped, multi-edges merged)."""
        e = self.edges[self.edges[:, 0] != self.edges[:, 1]]
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        key = np.unique(src * self.n + dst)
        src, dst = key // self.n, key % self.n
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr, dst.astype(np.int64)

    def is_simple(self) -> bool:
        e = self.edges
        if np.any(e[:, 0] == e[:, 1]):
            return False
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        return np.unique(lo * self.n + hi).shape[0] == e.shape[0]

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, m={self.m})"


def from_edges(edges: Iterable[tuple[int, int]], n: Optional[int] = None) -> Multigraph:
    """Build a graph from dense-id edges; ``n`` defaults to max id + 1."""
    arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(arr.max()) + 1 if arr.size else 0
    return Multigraph(n, arr)


# -- edge-list I/O ------------------------------------------------------

def _parse_lines(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line[0] in "#%":
                continue
            parts = line.split()
            if len(parts) != 2 or not (parts[0].isdigit() and parts[1].isdigit()):
                raise GraphFormatError(path, lineno, line)
            rows.append((int(parts[0]), int(parts[1])))
    return np.asarray(rows, dtype=np.int64).reshape(-1, 2)


def load_edge_list(path) -> Multigraph:
    """Read a whitespace-separated ``u v`` edge list.

    Every line becomes one edge (duplicates and both directions are kept).
    Labels are remapped to dense ids in ascending label order; the original
    labels are available as ``graph.labels``.
    """
    raw = _parse_lines(path)
    labels, inverse = np.unique(raw, return_inverse=True)
    return Multigraph(labels.shape[0], inverse.reshape(-1, 2), labels)


def write_edge_list(g: Multigraph, path, header: Optional[str] = None) -> None:
    """Write ``g`` as an edge list using its labels; written atomically."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    lab = g.labels[g.edges]
    with open(tmp, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        if lab.size:
            np.savetxt(fh, lab, fmt="%d")
    os.replace(tmp, path)


def write_dot(g: Multigraph, path) -> None:
    """DOT export for external layout tools. Multi-edges are repeated."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("graph G {\n")
        for lab in g.labels:
            fh.write(f"  {lab};\n")
        for u, v in g.labels[g.edges]:
            fh.write(f"  {u} -- {v};\n")
        fh.write("}\n")


# -- preprocessing -----------------------------------------------------

def largest_component(n: int, edges: np.ndarray) -> np.ndarray:
    """Boolean mask of the largest connected component.

    Ties between equal-size components go to the one holding the smallest id.
    """
    if n == 0:
        return np.zeros(0, dtype=bool)
    adj = coo_matrix((np.ones(edges.shape[0]), (edges[:, 0], edges[:, 1])), shape=(n, n))
    _, comp = connected_components(adj, directed=False)
    sizes = np.bincount(comp)
    first = np.full(sizes.shape[0], n, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(n))
    best = np.lexsort((first, -sizes))[0]
    return comp == best


def preprocess(g: Multigraph) -> Multigraph:
    """Simplify (drop loops, merge multi-edges, forget direction) and keep the LCC."""
    if g.n == 0 or g.m == 0:
        raise ValueError("cannot preprocess an empty graph")
    e = g.edges[g.edges[:, 0] != g.edges[:, 1]]
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    key = np.unique(lo * g.n + hi)
    if key.shape[0] == 0:
        raise ValueError("graph has no edges after simplification")
    e = np.stack([key // g.n, key % g.n], axis=1)
    # ids follow ascending label order, so the smallest id is the smallest label
    mask = largest_component(g.n, e)
    new_id = np.full(g.n, -1, dtype=np.int64)
    kept = np.flatnonzero(mask)
    new_id[kept] = np.arange(kept.shape[0])
    e = e[mask[e[:, 0]]]
    return Multigraph(kept.shape[0], new_id[e], g.labels[kept])

