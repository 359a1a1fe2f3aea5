"""Command-line entry point: ``graph-restore <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .crawl import (SamplingList, bfs_crawl, forest_fire_crawl, induced_subgraph, random_walk,
                    snowball_crawl)
from .estimate import InsufficientCollisionsError, LocalEstimates, estimate_all
from .experiment import ExperimentConfig, METHODS, compare_table, run_experiment
from .graph_core import GraphFormatError, load_edge_list, preprocess, write_dot, write_edge_list
from .metrics import compute_all, l1_distance
from .restore import RestoreConfig, gjoka_generate, restore_from

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ESTIMATOR = 3
EXIT_IO = 4

log = logging.getLogger("graph_restore")


class ConfigError(Exception):
    pass


def _pick_seed_node(g, seed_node, rng_seed) -> int:
    if seed_node is None:
        return int(np.random.default_rng(rng_seed).integers(g.n))
    hit = np.flatnonzero(g.labels == seed_node)
    if hit.size == 0:
        raise ConfigError(f"seed node {seed_node} is not in the graph")
    return int(hit[0])


def cmd_prepare(args) -> int:
    g = preprocess(load_edge_list(args.raw))
    write_edge_list(g, args.out)
    print(f"n={g.n} m={g.m}")
    return EXIT_OK


def cmd_crawl(args) -> int:
    g = load_edge_list(args.graph)
    x = _pick_seed_node(g, args.seed_node, args.rng_seed)
    if args.method == "rw":
        L = random_walk(g, x, args.fraction, args.rng_seed)
    elif args.method == "bfs":
        L = bfs_crawl(g, x, args.fraction)
    elif args.method == "snowball":
        L = snowball_crawl(g, x, args.fraction, args.k, args.rng_seed)
    else:
        L = forest_fire_crawl(g, x, args.fraction, args.p_f, args.rng_seed)
    L.write(args.out)
    print(f"seed={int(g.labels[x])} steps={len(L)} queried={len(L.distinct())}")
    return EXIT_OK


def cmd_subgraph(args) -> int:
    sub = induced_subgraph(SamplingList.read(args.walk))
    g = sub.graph()
    write_edge_list(g, args.out)
    if args.dot:
        write_dot(g, args.dot)
    print(f"queried={sub.queried.size} visible={sub.visible.size} edges={g.m}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    est = estimate_all(SamplingList.read(args.walk), args.M)
    text = est.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return EXIT_OK


def _dump_targets(res, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "degree_vector.tsv", "w") as fh:
        fh.write("k\tn_target\n")
        for k, c in sorted(res.dv.as_dict().items()):
            fh.write(f"{k}\t{c}\n")
    with open(directory / "jdm.tsv", "w") as fh:
        fh.write("k1\tk2\tm_target\n")
        for (k1, k2), c in sorted(res.jdm.as_dict().items()):
            if k1 <= k2:
                fh.write(f"{k1}\t{k2}\t{c}\n")
    (directory / "report.json").write_text(json.dumps({
        "timings": res.timings, "rewiring": asdict(res.rewiring),
        "n": res.graph.n, "m": res.graph.m,
    }, indent=1))


def _generate(args, gjoka: bool) -> int:
    L = SamplingList.read(args.walk)
    est = LocalEstimates.from_json(Path(args.estimates).read_text()) if args.estimates else None
    cfg = RestoreConfig(R_C=args.R_C, rng_seed=args.rng_seed, M=args.M)
    if gjoka:
        res = gjoka_generate(L, cfg) if est is None else restore_from(
            L, est, RestoreConfig(**{**asdict(cfg), "skip_modification": True,
                                     "empty_subgraph": True, "protect_nothing": True}))
    else:
        res = restore_from(L, est, cfg)
    write_edge_list(res.graph, args.out)
    if args.dump_targets:
        _dump_targets(res, Path(args.dump_targets))
    t = res.timings
    print(f"n={res.graph.n} m={res.graph.m} total={t['total']:.2f}s rewiring={t['rewiring']:.2f}s")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    orig = compute_all(load_edge_list(args.original))
    gen = compute_all(load_edge_list(args.generated))
    rep = l1_distance(orig, gen)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        orig.write_json(out / "original_properties.json")
        gen.write_json(out / "generated_properties.json")
        gen.write_tables(out / "tables")
        rep.write_csv(out / "l1.csv")
    for name, v in rep.distances.items():
        print(f"{name}\t{v:.6f}")
    print(f"average\t{rep.mean:.6f} +/- {rep.std:.6f}")
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = dict(dataset=args.dataset, fraction=args.fraction, runs=args.runs,
                     rng_seed=args.rng_seed, R_C=args.R_C, M=args.M, jobs=args.jobs,
                     snowball_k=args.k, p_f=args.p_f,
                     methods=args.methods.split(",") if args.methods else None)
    try:
        if args.config:
            cfg = ExperimentConfig.from_file(args.config, **overrides)
        else:
            if not args.dataset:
                raise ConfigError("--dataset or --config is required")
            cfg = ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
        cfg.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    summary = run_experiment(cfg, args.out)
    print(compare_table([(Path(args.out).name, summary)]))
    return EXIT_OK


def cmd_compare(args) -> int:
    sets = [(Path(d).name, json.loads((Path(d) / "summary.json").read_text())) for d in args.results]
    try:
        print(compare_table(sets))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return EXIT_OK


def _add_generation_flags(p) -> None:
    p.add_argument("walk", help="sampling list written by 'crawl --method rw'")
    p.add_argument("-o", "--out", required=True, help="output edge list")
    p.add_argument("--estimates", help="reuse estimates written by 'estimate'")
    p.add_argument("--R-C", dest="R_C", type=float, default=500, help="rewiring attempts per candidate edge")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("-M", type=int, default=None, help="minimum index gap for pair sums (default 2.5%% of r)")
    p.add_argument("--dump-targets", metavar="DIR", help="write degree vector, JDM and report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graph-restore", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="simplify a raw edge list and keep its largest component")
    p.add_argument("raw")
    p.add_argument("out")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("crawl", help="crawl a graph and write the sampling list")
    p.add_argument("graph")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--method", choices=["rw", "bfs", "snowball", "ff"], default="rw")
    p.add_argument("--fraction", type=float, default=0.1)
    p.add_argument("--seed-node", type=int, default=None, help="label of the start node (default: random)")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--k", type=int, default=50, help="snowball branching limit")
    p.add_argument("--p-f", type=float, default=0.7, help="forest fire burning probability")
    p.set_defaults(func=cmd_crawl)

    p = sub.add_parser("subgraph", help="sampled subgraph of a sampling list")
    p.add_argument("walk")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--dot", help="also write a DOT file")
    p.set_defaults(func=cmd_subgraph)

    p = sub.add_parser("estimate", help="local property estimates from a random walk")
    p.add_argument("walk")
    p.add_argument("-o", "--out")
    p.add_argument("-M", type=int, default=None)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("restore", help="restore a graph around the walk's subgraph")
    _add_generation_flags(p)
    p.set_defaults(func=lambda a: _generate(a, gjoka=False))

    p = sub.add_parser("gjoka", help="estimate-only 2.5K baseline")
    _add_generation_flags(p)
    p.set_defaults(func=lambda a: _generate(a, gjoka=True))

    p = sub.add_parser("evaluate", help="12 properties and L1 distances of a generated graph")
    p.add_argument("original")
    p.add_argument("generated")
    p.add_argument("-o", "--out", help="directory for reports")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="repeated runs of several methods on one dataset")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    p.add_argument("--dataset")
    p.add_argument("--methods", help=f"comma list from {','.join(METHODS)}")
    p.add_argument("--fraction", type=float)
    p.add_argument("--runs", type=int)
    p.add_argument("--rng-seed", type=int)
    p.add_argument("--R-C", dest="R_C", type=float)
    p.add_argument("-M", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p-f", type=float)
    p.add_argument("--jobs", type=int, help="runs executed in parallel processes")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="side-by-side L1 table of result directories")
    p.add_argument("results", nargs="+")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InsufficientCollisionsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR
    except (GraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
