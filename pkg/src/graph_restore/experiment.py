"""Repeated crawl / generate / evaluate runs over one dataset."""
from __future__ import annotations

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .crawl import (SamplingList, bfs_crawl, forest_fire_crawl, induced_subgraph, random_walk,
                    snowball_crawl)
from .estimate import InsufficientCollisionsError
from .graph_core import Multigraph, load_edge_list, write_edge_list
from .metrics import PROPERTIES, PropertyReport, compute_all, l1_distance
from .restore import RestoreConfig, gjoka_generate, restore

log = logging.getLogger(__name__)

METHODS = ("bfs", "snowball", "ff", "rw-subgraph", "gjoka", "proposed")
WALK_METHODS = ("rw-subgraph", "gjoka", "proposed")


@dataclass
class ExperimentConfig:
    dataset: str
    methods: list = field(default_factory=lambda: list(METHODS))
    fraction: float = 0.1
    runs: int = 10
    rng_seed: int = 0
    snowball_k: int = 50
    p_f: float = 0.7
    R_C: float = 500
    M: int | None = None
    jobs: int = 1

    def validate(self) -> None:
        if not 0 < self.fraction <= 1:
            raise ValueError("fraction must lie in (0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {list(METHODS)}")

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        doc = json.loads(Path(path).read_text())
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**doc)


def _write_json(path: Path, doc) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, indent=1))
    os.replace(tmp, path)


def run_seeds(cfg: ExperimentConfig) -> list[dict]:
    """Per-run seeds: one seed node draw and one stream per method."""
    out = []
    for child in np.random.SeedSequence(cfg.rng_seed).spawn(cfg.runs):
        s = child.generate_state(4)
        out.append({"seed_node": int(s[0]), "walk": int(s[1]), "crawl": int(s[2]), "restore": int(s[3])})
    return out


def _generate(method: str, g: Multigraph, seed_node: int, L: SamplingList | None,
              seeds: dict, cfg: ExperimentConfig):
    """Returns (graph, timings)."""
    t0 = time.perf_counter()
    if method == "bfs":
        out = induced_subgraph(bfs_crawl(g, seed_node, cfg.fraction)).graph()
    elif method == "snowball":
        out = induced_subgraph(snowball_crawl(g, seed_node, cfg.fraction, cfg.snowball_k, seeds["crawl"])).graph()
    elif method == "ff":
        out = induced_subgraph(forest_fire_crawl(g, seed_node, cfg.fraction, cfg.p_f, seeds["crawl"])).graph()
    elif method == "rw-subgraph":
        out = induced_subgraph(L).graph()
    else:
        rc = RestoreConfig(R_C=cfg.R_C, rng_seed=seeds["restore"], M=cfg.M)
        res = (restore if method == "proposed" else gjoka_generate)(L, rc)
        return res.graph, dict(res.timings)
    return out, {"total": time.perf_counter() - t0}


def execute_run(g: Multigraph, orig: PropertyReport, cfg: ExperimentConfig, index: int,
                seeds: dict, out_dir: Path | None = None) -> dict:
    """One run of every configured method from a shared seed node and walk."""
    seed_node = seeds["seed_node"] % g.n
    L = None
    if any(m in WALK_METHODS for m in cfg.methods):
        L = random_walk(g, seed_node, cfg.fraction, seeds["walk"])
    run_dir = None
    if out_dir is not None:
        run_dir = out_dir / f"run_{index:02d}"
        run_dir.mkdir(parents=True, exist_ok=True)
        _write_json(run_dir / "seeds.json", {"seed_node": seed_node, "streams": seeds})
        if L is not None:
            L.write(run_dir / "walk.list")
    result = {"run": index, "seed_node": seed_node, "methods": {}}
    for method in cfg.methods:
        entry: dict = {}
        try:
            gen, timings = _generate(method, g, seed_node, L, seeds, cfg)
        except InsufficientCollisionsError as exc:
            entry = {"failed": str(exc)}
            log.warning("run %d %s failed: %s", index, method, exc)
        else:
            props = compute_all(gen)
            l1 = l1_distance(orig, props)
            entry = {"timings": timings, "l1": l1.to_dict(), "n": gen.n, "m": gen.m}
            if run_dir is not None:
                mdir = run_dir / method
                mdir.mkdir(exist_ok=True)
                write_edge_list(gen, mdir / "graph.edges")
                props.write_json(mdir / "properties.json")
                l1.write_csv(mdir / "l1.csv")
                _write_json(mdir / "result.json", entry)
        result["methods"][method] = entry
    return result


def _job(args):
    path, orig_doc, cfg_doc, index, seeds, out_dir = args
    g = load_edge_list(path)
    return execute_run(g, PropertyReport.from_dict(orig_doc), ExperimentConfig(**cfg_doc),
                       index, seeds, Path(out_dir) if out_dir else None)


def aggregate(results: list[dict], methods) -> dict:
    """Mean and SD over successful runs of each per-property distance and of timings."""
    agg = {}
    for method in methods:
        ok = [r["methods"][method] for r in results if "l1" in r["methods"].get(method, {})]
        row = {"runs": len(ok), "failed": len(results) - len(ok)}
        if ok:
            for p in PROPERTIES:
                vals = np.array([e["l1"]["distances"][p] for e in ok])
                row[p] = {"mean": float(vals.mean()), "sd": float(vals.std())}
            # summary over the 12 run-averaged distances
            per_prop = np.array([row[p]["mean"] for p in PROPERTIES])
            row["average"] = {"mean": float(per_prop.mean()), "sd": float(per_prop.std())}
            for key in ("total", "construction", "rewiring"):
                t = [e["timings"][key] for e in ok if key in e["timings"]]
                if t:
                    row[f"time_{key}"] = float(np.mean(t))
        agg[method] = row
    return agg


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> dict:
    cfg.validate()
    g = load_edge_list(cfg.dataset)
    orig = compute_all(g)
    seeds = run_seeds(cfg)
    out = Path(out_dir) if out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "config.json", asdict(cfg))
        orig.write_json(out / "original_properties.json")
    if cfg.jobs > 1:
        args = [(cfg.dataset, orig.to_dict(), asdict(cfg), i, s, str(out) if out else None)
                for i, s in enumerate(seeds)]
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_job, args))
    else:
        results = [execute_run(g, orig, cfg, i, s, out) for i, s in enumerate(seeds)]
    summary = {"dataset": str(cfg.dataset), "fraction": cfg.fraction, "n": g.n, "m": g.m,
               "aggregate": aggregate(results, cfg.methods), "runs": results}
    if out is not None:
        _write_json(out / "summary.json", summary)
        write_aggregate_csv(summary, out / "aggregate.csv")
    return summary


def write_aggregate_csv(summary: dict, path) -> None:
    import csv

    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "runs", "failed"] + [f"{p}_{s}" for p in PROPERTIES + ("average",)
                                                   for s in ("mean", "sd")]
                   + ["time_total", "time_rewiring"])
        for method, row in summary["aggregate"].items():
            cells = [method, row["runs"], row["failed"]]
            for p in PROPERTIES + ("average",):
                cells += [row[p]["mean"], row[p]["sd"]] if p in row else ["", ""]
            cells += [row.get("time_total", ""), row.get("time_rewiring", "")]
            w.writerow(cells)
    os.replace(tmp, path)


GAP = "-"


def compare_table(summaries: list[tuple[str, dict]]) -> str:
    """Per-property L1 table with one column per (result set, method)."""
    base = summaries[0][1]
    for name, s in summaries[1:]:
        if s["dataset"] != base["dataset"] or not math.isclose(s["fraction"], base["fraction"]):
            raise ValueError(f"{name}: dataset or fraction differs from {summaries[0][0]}")
    cols = [(name, m) for name, s in summaries for m in s["aggregate"]]
    header = ["property"] + [f"{name}:{m}" for name, m in cols]
    lines = ["\t".join(header)]
    lookup = dict(summaries)
    for p in PROPERTIES:
        cells = [p]
        for name, m in cols:
            row = lookup[name]["aggregate"][m]
            cells.append(f"{row[p]['mean']:.3f}" if p in row else GAP)
        lines.append("\t".join(cells))
    cells = ["average"]
    for name, m in cols:
        row = lookup[name]["aggregate"][m]
        cells.append(f"{row['average']['mean']:.3f} +/- {row['average']['sd']:.3f}" if "average" in row else GAP)
    lines.append("\t".join(cells))
    return "\n".join(lines)
