"""End-to-end restoration from a random-walk sampling list."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from ..crawl import SampledSubgraph, SamplingList, induced_subgraph
from ..estimate import LocalEstimates, estimate_all
from ..graph_core import Multigraph
from .construct import StubGraph, construct_graph
from .rewire import RESYNC_EVERY, RewireReport, rewire_stubs
from .targets import (TargetDegreeVector, TargetJDM, adjust_degree_vector, adjust_jdm,
                      degree_classes, init_degree_vector, init_jdm, modify_degree_vector,
                      modify_jdm, subgraph_jdm)


@dataclass
class RestoreConfig:
    R_C: float = 500
    rng_seed: int = 0
    M: int | None = None
    resync_every: int = RESYNC_EVERY
    # the three switches below turn the pipeline into the estimate-only baseline
    skip_modification: bool = False
    empty_subgraph: bool = False
    protect_nothing: bool = False


GJOKA = dict(skip_modification=True, empty_subgraph=True, protect_nothing=True)


@dataclass
class RestoreResult:
    graph: Multigraph
    estimates: LocalEstimates
    subgraph: SampledSubgraph | None
    dv_initial: TargetDegreeVector
    dv: TargetDegreeVector
    assignment: dict
    jdm: TargetJDM
    m_sub: np.ndarray | None
    constructed: StubGraph
    rewiring: RewireReport
    timings: dict = field(default_factory=dict)


def restore_from(L: SamplingList, est: LocalEstimates | None = None,
                 config: RestoreConfig | None = None) -> RestoreResult:
    cfg = config or RestoreConfig()
    rng = np.random.default_rng(cfg.rng_seed)
    t0 = time.perf_counter()
    sub = None if cfg.empty_subgraph else induced_subgraph(L)
    if est is None:
        est = estimate_all(L, cfg.M)

    sub_max = 0
    if sub is not None:
        sub_max = int(sub.graph().degrees.max(initial=0))
    dv = adjust_degree_vector(init_degree_vector(est, sub_max))
    dv_initial = dv.copy()
    assignment: dict = {}
    if sub is not None and not cfg.skip_modification:
        dv, assignment = modify_degree_vector(dv, sub, rng)

    ks = degree_classes(est, dv)
    jdm, dv = adjust_jdm(init_jdm(est, ks), dv, rng)
    m_sub = None
    if sub is not None and not cfg.skip_modification:
        m_sub = subgraph_jdm(sub, assignment, ks)
        jdm, dv = modify_jdm(jdm, m_sub, dv, rng)

    built = construct_graph(sub if not cfg.skip_modification else None, dv, assignment, jdm, m_sub, rng)
    t_built = time.perf_counter()
    sg = built.copy()
    if cfg.protect_nothing:
        sg.protected = np.zeros_like(sg.protected)
    seed = int(rng.integers(2**31 - 1))
    report = rewire_stubs(sg, est.c_k, R_C=cfg.R_C, seed=seed, resync_every=cfg.resync_every)
    t_end = time.perf_counter()
    return RestoreResult(
        graph=sg.to_multigraph(), estimates=est, subgraph=sub, dv_initial=dv_initial, dv=dv,
        assignment=assignment, jdm=jdm, m_sub=m_sub, constructed=built, rewiring=report,
        timings={"total": t_end - t0, "construction": t_built - t0, "rewiring": t_end - t_built},
    )


def restore(L: SamplingList, config: RestoreConfig | None = None) -> RestoreResult:
    """Restore a graph around the walk's sampled subgraph."""
    return restore_from(L, None, config)


def gjoka_generate(L: SamplingList, config: RestoreConfig | None = None) -> RestoreResult:
    """Estimate-only 2.5K generation: no subgraph, every edge rewirable."""
    return restore_from(L, None, replace(config or RestoreConfig(), **GJOKA))
