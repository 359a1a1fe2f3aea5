"""Re-weighted random-walk estimators of local structural properties.

All estimators read only the sampling list. An adjacency entry
``A[x_i, x_j]`` between two sampled nodes is the multiplicity of ``x_j`` in
the recorded neighbor list of ``x_i``.

The pair sums over ``I = {(i, j) : |i - j| >= M}`` are evaluated as the sum
over all ordered pairs minus the pairs closer than ``M``. The all-pairs part
factorises over distinct nodes, so the cost is ``O(r * M + sum of degrees)``
instead of ``O(r^2)``.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .crawl import SamplingList

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


class InsufficientCollisionsError(ValueError):
    """The walk has no node revisits at distance >= M, so n_hat is undefined."""


@dataclass
class LocalEstimates:
    n_hat: float
    k_avg_hat: float
    p_k: dict
    p_kk: dict
    c_k: dict
    k_max_hat: int = 0
    r: int = 0
    M: int = 0
    clamped: list = field(default_factory=list)

    def to_json(self) -> str:
        doc = {
            "version": FORMAT_VERSION,
            "n_hat": self.n_hat,
            "k_avg_hat": self.k_avg_hat,
            "p_k": {str(k): v for k, v in sorted(self.p_k.items())},
            "p_kk": [[k1, k2, v] for (k1, k2), v in sorted(self.p_kk.items())],
            "c_k": {str(k): v for k, v in sorted(self.c_k.items())},
            "k_max_hat": self.k_max_hat,
            "r": self.r,
            "M": self.M,
            "clamped": sorted(self.clamped),
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "LocalEstimates":
        doc = json.loads(text)
        if doc.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported estimates version {doc.get('version')!r}")
        return cls(
            n_hat=float(doc["n_hat"]),
            k_avg_hat=float(doc["k_avg_hat"]),
            p_k={int(k): float(v) for k, v in doc["p_k"].items()},
            p_kk={(int(a), int(b)): float(v) for a, b, v in doc["p_kk"]},
            c_k={int(k): float(v) for k, v in doc["c_k"].items()},
            k_max_hat=int(doc.get("k_max_hat", 0)),
            r=int(doc.get("r", 0)),
            M=int(doc.get("M", 0)),
            clamped=[int(k) for k in doc.get("clamped", [])],
        )


def default_M(r: int) -> int:
    return int(math.floor(0.025 * r))


class _Walk:
    """Array views of a sampling list shared by the estimators."""

    def __init__(self, L: SamplingList):
        if len(L) == 0:
            raise ValueError("empty sampling list")
        self.r = len(L)
        self.x = L.nodes
        self.deg = L.degrees
        if np.any(self.deg < 1):
            raise ValueError("sampled nodes must have degree >= 1")
        table = L.distinct()
        self.labels = np.unique(np.concatenate([self.x] + list(table.values())))
        self.N = self.labels.shape[0]
        self.lx = np.searchsorted(self.labels, self.x)
        keys = [np.searchsorted(self.labels, u) * self.N + np.searchsorted(self.labels, nb)
                for u, nb in table.items()]
        self.keys = np.sort(np.concatenate(keys))
        self.table = table

    def adjacency(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """``A[a, b]`` for arrays of local ids; ``a`` must be queried nodes."""
        k = a * self.N + b
        return np.searchsorted(self.keys, k, side="right") - np.searchsorted(self.keys, k, side="left")


def _pair_count(r: int, M: int) -> int:
    if M <= 0:
        return r * r
    return (r - M) * (r - M + 1)


def _check_M(r: int, M: int) -> None:
    if M < 0:
        raise ValueError("M must be non-negative")
    if r < 2 * M + 2:
        raise ValueError(f"walk too short: r={r} < 2M+2={2 * M + 2}")


def _num_nodes(w: _Walk, M: int) -> float:
    d = w.deg.astype(np.float64)
    num = d.sum() * (1.0 / d).sum()
    counts = np.bincount(w.lx)
    den = int(np.dot(counts, counts))
    if M >= 1:
        num -= w.r
        den -= w.r
    for delta in range(1, M):
        a, b = d[:-delta], d[delta:]
        num -= (a / b).sum() + (b / a).sum()
        den -= 2 * int(np.count_nonzero(w.lx[:-delta] == w.lx[delta:]))
    if den <= 0:
        raise InsufficientCollisionsError(
            f"no revisits at lag >= {M} in a walk of length {w.r}; lengthen the walk")
    return num / den


def estimate_num_nodes(L: SamplingList, M: int | None = None) -> float:
    """Collision-based estimate of the number of nodes."""
    M = default_M(len(L)) if M is None else M
    _check_M(len(L), M)
    return _num_nodes(_Walk(L), M)


def _phi_bar(w: _Walk) -> float:
    return float((1.0 / w.deg).sum() / w.r)


def estimate_avg_degree(L: SamplingList) -> float:
    """Harmonic-mean estimate of the average degree."""
    return 1.0 / _phi_bar(_Walk(L))


def _phi_k(w: _Walk) -> dict:
    ks, cnt = np.unique(w.deg, return_counts=True)
    return {int(k): c / (k * w.r) for k, c in zip(ks, cnt)}


def estimate_degree_dist(L: SamplingList) -> dict:
    w = _Walk(L)
    pb = _phi_bar(w)
    return {k: v / pb for k, v in _phi_k(w).items()}


def _jdd(w: _Walk, M: int, n_hat: float, k_avg: float) -> dict:
    ks = np.unique(w.deg)
    nd = ks.shape[0]
    di = np.searchsorted(ks, w.deg)  # degree class of each step

    # induced edges: integer weights W[k, k'] = sum over I of A[x_i, x_j]
    counts = np.bincount(w.lx, minlength=w.N)
    deg_of = np.zeros(w.N, dtype=np.int64)
    deg_of[w.lx] = di
    rows, cols, wts = [], [], []
    for u, nb in w.table.items():
        lu = np.searchsorted(w.labels, u)
        lv = np.searchsorted(w.labels, nb)
        lv = lv[counts[lv] > 0]
        rows.append(np.full(lv.shape[0], deg_of[lu]))
        cols.append(deg_of[lv])
        wts.append(counts[lu] * counts[lv])
    flat = np.concatenate(rows) * nd + np.concatenate(cols)
    W = np.bincount(flat, weights=np.concatenate(wts).astype(np.float64), minlength=nd * nd)
    for delta in range(0, M):
        a, b = w.lx[: w.r - delta], w.lx[delta:]
        A = w.adjacency(a, b).astype(np.float64)
        ca, cb = di[: w.r - delta], di[delta:]
        W -= np.bincount(ca * nd + cb, weights=A, minlength=nd * nd)
        if delta:
            W -= np.bincount(cb * nd + ca, weights=A, minlength=nd * nd)
    W = W.reshape(nd, nd)
    kk = np.outer(ks, ks).astype(np.float64)
    p_ie = n_hat * k_avg * W / (kk * _pair_count(w.r, M))

    # traversed edges
    a, b = di[:-1], di[1:]
    T = np.bincount(a * nd + b, minlength=nd * nd) + np.bincount(b * nd + a, minlength=nd * nd)
    p_te = T.reshape(nd, nd) / (2.0 * (w.r - 1))

    use_ie = (ks[:, None] + ks[None, :]) >= 2.0 * k_avg
    P = np.where(use_ie, p_ie, p_te)
    P = 0.5 * (P + P.T)  # the sums are symmetric already; this removes rounding asymmetry
    out = {}
    for i, j in zip(*np.nonzero(P > 0)):
        out[(int(ks[i]), int(ks[j]))] = float(P[i, j])
    return out


def estimate_jdd(L: SamplingList, M: int | None = None) -> dict:
    """Hybrid induced-edge / traversed-edge joint degree distribution."""
    M = default_M(len(L)) if M is None else M
    _check_M(len(L), M)
    w = _Walk(L)
    n_hat = _num_nodes(w, M)
    return _jdd(w, M, n_hat, 1.0 / _phi_bar(w))


def _ddcc(w: _Walk) -> tuple[dict, list]:
    if w.r < 3:
        raise ValueError("clustering estimate needs r >= 3")
    phi = _phi_k(w)
    mid = w.deg[1:-1]
    closed = w.adjacency(w.lx[:-2], w.lx[2:]).astype(np.float64)
    ks = np.unique(mid)
    sums = dict(zip(ks.tolist(), (closed[mid == k].sum() for k in ks)))
    out, clamped = {}, []
    for k in phi:
        if k == 1:
            out[k] = 0.0
            continue
        c = sums.get(k, 0.0) / ((k - 1) * (w.r - 2)) / phi[k]
        if c < 0.0 or c > 1.0:
            clamped.append(k)
            c = min(max(c, 0.0), 1.0)
        out[k] = c
    if clamped:
        log.warning("clustering estimate clamped to [0, 1] for degrees %s", clamped)
    return out, clamped


def estimate_ddcc(L: SamplingList) -> dict:
    """Degree-dependent clustering from the closure of consecutive step triples."""
    return _ddcc(_Walk(L))[0]


def estimate_all(L: SamplingList, M: int | None = None) -> LocalEstimates:
    M = default_M(len(L)) if M is None else M
    _check_M(len(L), M)
    w = _Walk(L)
    n_hat = _num_nodes(w, M)
    pb = _phi_bar(w)
    k_avg = 1.0 / pb
    p_k = {k: v / pb for k, v in _phi_k(w).items()}
    p_kk = _jdd(w, M, n_hat, k_avg)
    c_k, clamped = _ddcc(w)
    return LocalEstimates(
        n_hat=n_hat, k_avg_hat=k_avg, p_k=p_k, p_kk=p_kk, c_k=c_k,
        k_max_hat=int(w.deg.max()), r=w.r, M=M, clamped=clamped,
    )
