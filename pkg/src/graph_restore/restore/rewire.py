"""Degree-preserving rewiring toward a target degree-dependent clustering."""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..graph_core import Multigraph
from .construct import StubGraph

RESYNC_EVERY = 10**6
RESYNC_TOL = 1e-9


@dataclass
class RewireReport:
    attempts: int
    accepted: int
    failed: int
    candidates: int  # |E_rew|
    d_initial: float
    d_final: float
    drift: float
    seconds: float


def _arrays(sg: StubGraph, c_target: dict):
    deg = sg.degrees
    size = int(max(deg.max(initial=0), max(c_target, default=0))) + 2
    nk = np.bincount(deg, minlength=size).astype(np.int64)
    target = np.zeros(size)
    for k, c in c_target.items():
        target[k] = c
    denom = float(sum(c_target.values()))
    if denom <= 0:
        denom = 1.0
    t = _kernels.triangles_csr(sg.offs, sg.owner[sg.partner], sg.n)
    T = np.bincount(deg, weights=t, minlength=size).astype(np.int64)
    return deg.astype(np.int64), nk, target, denom, T


def clustering_distance(sg: StubGraph, c_target: dict) -> float:
    """Normalized L1 distance between the graph's c(k) and ``c_target`` (from scratch)."""
    _, nk, target, denom, T = _arrays(sg, c_target)
    return float(_kernels.distance_from_totals(T, nk, target, denom))


def rewire_stubs(sg: StubGraph, c_target: dict, R_C: float = 500, seed: int = 0,
                 resync_every: int = RESYNC_EVERY, attempts: int | None = None) -> RewireReport:
    """Rewire ``sg`` in place. Protected stubs are never touched.

    ``attempts`` overrides ``R_C * |E_rew|`` when given.
    """
    t0 = time.perf_counter()
    deg, nk, target, denom, T = _arrays(sg, c_target)
    cand = np.flatnonzero(~sg.protected).astype(np.int64)
    n_rew = cand.shape[0] // 2
    if attempts is None:
        attempts = int(R_C * n_rew)
    owner_deg = deg[sg.owner[cand]]
    order = np.argsort(owner_deg, kind="stable")
    bucket = cand[order]
    bucket_ptr = np.zeros(target.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner_deg, minlength=target.shape[0]), out=bucket_ptr[1:])
    d0 = float(_kernels.distance_from_totals(T, nk, target, denom))
    if n_rew == 0 or attempts == 0:
        return RewireReport(attempts, 0, attempts, n_rew, d0, d0, 0.0, time.perf_counter() - t0)
    accepted, failed, d_final, drift = _kernels.rewire_kernel(
        sg.offs, sg.owner, sg.partner, deg, cand, bucket_ptr, bucket, T, nk, target,
        denom, attempts, int(seed), int(resync_every), 64)
    if drift > RESYNC_TOL:
        raise AssertionError(f"incremental clustering distance drifted by {drift:g}")
    return RewireReport(attempts, int(accepted), int(failed), n_rew, d0, float(d_final),
                        float(drift), time.perf_counter() - t0)


def stubs_from_graph(g: Multigraph, protected_edges=()) -> StubGraph:
    """Half-edge view of ``g``; the given edges (dense ids, a multiset) are protected."""
    offs = g.indptr.copy()
    owner = np.repeat(np.arange(g.n), g.degrees)
    partner = np.full(offs[-1], -1, dtype=np.int64)
    protected = np.zeros(offs[-1], dtype=bool)
    want = Counter((min(u, v), max(u, v)) for u, v in np.asarray(protected_edges).reshape(-1, 2).tolist())
    nxt = offs[:-1].copy()
    for u, v in g.edges.tolist():
        su = nxt[u]
        nxt[u] += 1
        sv = nxt[v]
        nxt[v] += 1
        partner[su] = sv
        partner[sv] = su
        key = (min(u, v), max(u, v))
        if want.get(key, 0) > 0:
            want[key] -= 1
            protected[su] = protected[sv] = True
    missing = +want
    if missing:
        raise ValueError(f"protected edges not in graph: {sorted(missing)[:5]}")
    return StubGraph(offs, owner, partner, protected, g.labels)


def rewire(g: Multigraph, protected_edges, c_target: dict, R_C: float = 500,
           rng_seed: int = 0, **kw) -> tuple[Multigraph, RewireReport]:
    """Rewire a copy of ``g``; returns the new graph and a report."""
    sg = stubs_from_graph(g, protected_edges)
    report = rewire_stubs(sg, c_target, R_C=R_C, seed=rng_seed, **kw)
    return sg.to_multigraph(), report
