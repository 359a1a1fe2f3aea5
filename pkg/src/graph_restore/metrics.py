"""Structural properties of a graph and normalized L1 distances between graphs."""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import identity

from . import _kernels
from .graph_core import Multigraph, largest_component

PROPERTIES = ("n", "k_avg", "p_k", "knn_k", "c_avg", "c_k", "p_s",
              "l_avg", "p_l", "l_max", "b_k", "lambda1")
DISTRIBUTIONS = {"p_k", "knn_k", "c_k", "p_s", "p_l", "b_k"}
WORKERS_ENV = "GRAPH_RESTORE_WORKERS"
N_CHUNKS = 64  # fixed source partition, so results do not depend on thread count


class ConvergenceError(RuntimeError):
    def __init__(self, msg: str, estimate: float):
        super().__init__(msg)
        self.estimate = estimate


@dataclass
class PropertyReport:
    n: int = 0
    k_avg: float = 0.0
    p_k: dict = field(default_factory=dict)
    knn_k: dict = field(default_factory=dict)
    c_avg: float = 0.0
    c_k: dict = field(default_factory=dict)
    p_s: dict = field(default_factory=dict)
    l_avg: float | None = None
    p_l: dict = field(default_factory=dict)
    l_max: int | None = None
    b_k: dict = field(default_factory=dict)
    lambda1: float = 0.0

    def to_dict(self) -> dict:
        out = asdict(self)
        for name in DISTRIBUTIONS:
            out[name] = {str(k): v for k, v in sorted(out[name].items())}
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "PropertyReport":
        kw = dict(doc)
        for name in DISTRIBUTIONS:
            kw[name] = {int(k): float(v) for k, v in doc.get(name, {}).items()}
        return cls(**{k: kw[k] for k in PROPERTIES if k in kw})

    def write_json(self, path) -> None:
        _atomic_write(path, json.dumps(self.to_dict(), indent=1))

    @classmethod
    def read_json(cls, path) -> "PropertyReport":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def write_csv(self, path) -> None:
        """One row per property; distributions are stored as JSON objects."""
        d = self.to_dict()
        rows = [[name, json.dumps(d[name]) if name in DISTRIBUTIONS else d[name]] for name in PROPERTIES]
        _write_rows(path, ["property", "value"], rows)

    def write_tables(self, directory) -> None:
        """Two-column ``key value`` tables, one per distribution, for plotting."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name in sorted(DISTRIBUTIONS):
            lines = [f"{k} {v!r}" for k, v in sorted(getattr(self, name).items())]
            _atomic_write(directory / f"{name}.tsv", "\n".join(lines) + "\n")


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_rows(path, header, rows) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    os.replace(tmp, path)


def _by_degree(deg: np.ndarray, values: np.ndarray) -> dict:
    """Mean of ``values`` per degree (degree 0 skipped)."""
    ks, inv = np.unique(deg, return_inverse=True)
    sums = np.bincount(inv, weights=values)
    cnt = np.bincount(inv)
    return {int(k): float(s / c) for k, s, c in zip(ks, sums, cnt) if k > 0}


def local_clustering(g: Multigraph) -> np.ndarray:
    t = _kernels.triangles_csr(g.indptr, g.indices, g.n).astype(np.float64)
    d = g.degrees.astype(np.float64)
    c = np.zeros(g.n)
    ok = d >= 2
    c[ok] = 2.0 * t[ok] / (d[ok] * (d[ok] - 1.0))
    return c


def compute_local(g: Multigraph, report: PropertyReport | None = None) -> PropertyReport:
    """Degree, neighbor-degree, clustering and shared-partner properties."""
    if g.n == 0:
        raise ValueError("empty graph")
    rep = report or PropertyReport()
    deg = g.degrees
    rep.n = g.n
    rep.k_avg = float(deg.sum() / g.n)
    ks, cnt = np.unique(deg, return_counts=True)
    rep.p_k = {int(k): float(c / g.n) for k, c in zip(ks, cnt)}

    row = np.repeat(np.arange(g.n), deg)
    nbr_deg_sum = np.bincount(row, weights=deg[g.indices], minlength=g.n)
    per_node = nbr_deg_sum / np.maximum(deg, 1)
    rep.knn_k = _by_degree(deg, per_node)

    c = local_clustering(g)
    rep.c_avg = float(c.mean())
    rep.c_k = _by_degree(deg, c)

    sp = _kernels.shared_partners_csr(g.indptr, g.indices, g.n)
    if sp.size:
        s, sc = np.unique(sp, return_counts=True)
        rep.p_s = {int(a): float(b / sp.size) for a, b in zip(s, sc)}
    else:
        rep.p_s = {}
    return rep


def _workers() -> int | None:
    raw = os.environ.get(WORKERS_ENV)
    return int(raw) if raw else None


def path_statistics(g: Multigraph, workers: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact all-pairs statistics on the LCC of the underlying simple graph.

    Returns ``(lcc node ids, betweenness per LCC node, distance histogram)``;
    betweenness sums over ordered endpoint pairs.
    """
    import numba

    indptr, indices = g.simple_csr()
    src = np.repeat(np.arange(g.n), np.diff(indptr))
    mask = largest_component(g.n, np.stack([src, indices], axis=1))
    keep = np.flatnonzero(mask)
    new = np.full(g.n, -1, dtype=np.int64)
    new[keep] = np.arange(keep.shape[0])
    sel = mask[src]
    n = keep.shape[0]
    sub_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(new[src[sel]], minlength=n), out=sub_ptr[1:])
    sub_idx = new[indices[sel]]

    chunk = max(1, -(-n // N_CHUNKS))
    starts = np.arange(0, n, chunk, dtype=np.int64)
    workers = workers if workers is not None else _workers()
    prev = numba.get_num_threads()
    if workers:
        numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
    try:
        bc, hist = _kernels.brandes_chunks(sub_ptr, sub_idx, n, starts, chunk)
    finally:
        numba.set_num_threads(prev)
    # merge in fixed chunk order
    b = np.zeros(n)
    h = np.zeros(n + 1, dtype=np.int64)
    for c in range(starts.shape[0]):
        b += bc[c]
        h += hist[c]
    return keep, b, h


def compute_paths(g: Multigraph, report: PropertyReport | None = None,
                  workers: int | None = None) -> PropertyReport:
    """Path length and betweenness properties on the largest component."""
    if g.n == 0:
        raise ValueError("empty graph")
    rep = report or PropertyReport()
    keep, b, h = path_statistics(g, workers)
    n = keep.shape[0]
    rep.b_k = _by_degree(g.degrees[keep], b)
    if n < 2:
        rep.l_avg, rep.l_max, rep.p_l = None, None, {}
        return rep
    pairs = n * (n - 1)
    ls = np.flatnonzero(h[1:]) + 1
    rep.p_l = {int(l): float(h[l] / pairs) for l in ls}
    rep.l_avg = float(np.dot(ls, h[ls]) / pairs)
    rep.l_max = int(ls.max())
    return rep


def largest_eigenvalue(g: Multigraph, tol: float = 1e-8, max_iter: int = 200_000) -> float:
    """Largest adjacency eigenvalue by power iteration.

    Iterates on ``A + I`` so that a bipartite spectrum (``-lambda`` paired
    with ``lambda``) cannot stall convergence, starting from all ones.
    Stops when the residual ``|Bx - theta x|`` falls below ``tol * theta``.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    B = g.adjacency_matrix() + identity(g.n, format="csr")
    x = np.ones(g.n) / math.sqrt(g.n)
    theta = 0.0
    for _ in range(max_iter):
        y = B @ x
        theta = float(x @ y)
        if np.linalg.norm(y - theta * x) <= tol * theta:
            return theta - 1.0
        x = y / np.linalg.norm(y)
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps", theta - 1.0)


def compute_all(g: Multigraph, workers: int | None = None) -> PropertyReport:
    rep = compute_local(g)
    compute_paths(g, rep, workers)
    rep.lambda1 = largest_eigenvalue(g)
    return rep


# -- distances -----------------------------------------------------------

def l1_value(x, xt) -> float:
    """``sum |xt - x| / sum x``; dicts are compared over the union of keys."""
    if x is None or xt is None:
        return 0.0 if x is None and xt is None else math.inf
    if isinstance(x, dict):
        keys = set(x) | set(xt)
        num = sum(abs(xt.get(k, 0.0) - x.get(k, 0.0)) for k in keys)
        den = sum(x.values())
    else:
        num, den = abs(xt - x), x
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return float(num / den)


@dataclass
class L1Report:
    distances: dict
    infinite: list = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean([self.distances[p] for p in PROPERTIES]))

    @property
    def std(self) -> float:
        return float(np.std([self.distances[p] for p in PROPERTIES]))

    def to_dict(self) -> dict:
        return {"distances": dict(self.distances), "infinite": list(self.infinite),
                "mean": self.mean, "std": self.std}

    @classmethod
    def from_dict(cls, doc: dict) -> "L1Report":
        return cls({k: float(v) for k, v in doc["distances"].items()}, list(doc.get("infinite", [])))

    def write_csv(self, path) -> None:
        rows = [[p, self.distances[p]] for p in PROPERTIES]
        rows += [["mean", self.mean], ["std", self.std]]
        _write_rows(path, ["property", "l1"], rows)


def l1_distance(orig: PropertyReport, gen: PropertyReport) -> L1Report:
    dist, inf = {}, []
    for p in PROPERTIES:
        v = l1_value(getattr(orig, p), getattr(gen, p))
        dist[p] = v
        if math.isinf(v):
            inf.append(p)
    return L1Report(dist, inf)
