"""Command-line front end.

``hetmod detect``   communities of a typed edge-list file
``hetmod simulate`` planted-partition recovery sweep over the cross-type signal
``hetmod check``    consistency conditions of a block-model spec file

Exit codes: 0 success, 1 unreadable or invalid input, 2 infeasible options,
3 consistency conditions violated (``check`` only).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import warnings
from contextlib import contextmanager

import numpy as np

from .baselines import method1, method2
from .graph import EdgeListError, read_edge_list
from .louvain import LouvainConfig, run
from .metrics import nmi
from .oracle import MAX_PARTITION_NODES, max_modularity_exhaustive
from .sbm import SETTINGS, SpecError, check_consistency, read_spec, sample, setting_spec

EXIT_OK, EXIT_INPUT, EXIT_FLAGS, EXIT_VIOLATED = 0, 1, 2, 3

SIMULATION_HEADER = ["setting", "r3", "rep", "method", "node_type", "nmi", "Q", "K"]


class _Infeasible(Exception):
    pass


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _error(msg: str) -> None:
    print(f"hetmod: error: {msg}", file=sys.stderr)


# -- detect -----------------------------------------------------------------------------


def detect_document(path: str, restarts: int, seed: int, k: int | None, oracle: bool) -> dict:
    g = read_edge_list(path)
    if g.num_nodes == 0:
        raise _Infeasible("input has no nodes")
    if k is not None and not 1 <= k <= g.num_nodes:
        raise _Infeasible(f"--k {k} is outside 1..{g.num_nodes}")
    if oracle and g.num_nodes > MAX_PARTITION_NODES:
        raise _Infeasible(f"--oracle supports at most {MAX_PARTITION_NODES} nodes, input has {g.num_nodes}")
    start = time.perf_counter()
    res = run(g, LouvainConfig(restarts=restarts, seed=seed, target_k=k))
    doc = {
        "nodes": [
            {"type": g.type_names[l], "id": g.node_names[l][i], "community": int(res.partition.labels[l][i])}
            for l in range(g.num_types)
            for i in range(g.type_sizes[l])
        ],
        "Q": float(res.modularity),
        "K": int(res.num_communities),
        "kappa": restarts,
        "seed": seed,
    }
    if oracle:
        best = max_modularity_exhaustive(g)
        doc["oracle_Q"] = best.modularity
        doc["oracle_gap"] = max(best.modularity - res.modularity, 0.0)
    doc["wall_time"] = time.perf_counter() - start
    return doc


def cmd_detect(args: argparse.Namespace) -> int:
    try:
        doc = detect_document(args.input, args.restarts, args.seed, args.k, args.oracle)
    except (EdgeListError, OSError, UnicodeDecodeError) as exc:
        _error(str(exc))
        return EXIT_INPUT
    except _Infeasible as exc:
        _error(str(exc))
        return EXIT_FLAGS
    with _output(args.out) as fh:
        if args.format == "json":
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        else:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["type", "id", "community"])
            for row in doc["nodes"]:
                writer.writerow([row["type"], row["id"], row["community"]])
    if args.format == "csv":
        print(f"Q={doc['Q']:.6f} K={doc['K']}", file=sys.stderr)
    return EXIT_OK


# -- simulate ---------------------------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """``"a,b,c"`` or ``"start:stop:step"`` (stop included) into a list of values."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(count)]
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise _Infeasible(f"invalid grid {text!r}") from None
    if not values or any(not 0.0 <= v <= 1.0 for v in values):
        raise _Infeasible(f"grid values must lie in [0, 1]: {text!r}")
    return values


def default_grid(setting: int) -> list[float]:
    lo, hi = SETTINGS[setting]["r3_range"]
    return parse_grid(f"{lo}:{hi}:0.025")


def cell_seed(seed: int, r3_index: int, rep: int) -> int:
    """Deterministic per-cell seed, independent of the order cells are run in."""
    return int(np.random.SeedSequence([seed, r3_index, rep]).generate_state(1)[0])


def simulate_rows(setting: int, grid: list[float], reps: int, seed: int, restarts: int, sizes: tuple[int, ...]):
    """Yield CSV rows for every ``(r3, rep, method, node type)`` cell."""
    for ri, r3 in enumerate(grid):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spec = setting_spec(setting, r3, sizes)
        for rep in range(reps):
            s = cell_seed(seed, ri, rep)
            g, truth = sample(spec, s)
            cfg = LouvainConfig(restarts=restarts, seed=s)
            res = run(g, cfg)
            for l in range(g.num_types):
                score = nmi(res.partition.labels[l], truth.labels[l])
                yield [setting, r3, rep, "proposed", g.type_names[l], score, res.modularity, res.num_communities]
            for name, fn in (("method1", method1), ("method2", method2)):
                base = fn(g, cfg)
                scores = base.nmi_per_type(truth)
                for l in range(g.num_types):
                    q = base.modularity[0 if base.method == 1 else l]
                    k = base.num_communities[0 if base.method == 1 else l]
                    yield [setting, r3, rep, name, g.type_names[l], scores[l], q, k]


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        if args.setting not in SETTINGS:
            raise _Infeasible(f"unknown setting {args.setting}")
        grid = parse_grid(args.r3_grid) if args.r3_grid is not None else default_grid(args.setting)
        sizes = tuple(int(x) for x in args.sizes.split(","))
        if len(sizes) != 2 or any(n < 3 or n % 3 for n in sizes):
            raise _Infeasible("--sizes needs two type sizes, each a positive multiple of 3")
        if args.reps < 1 or args.restarts < 1:
            raise _Infeasible("--reps and --restarts must be >= 1")
    except _Infeasible as exc:
        _error(str(exc))
        return EXIT_FLAGS
    except ValueError:
        _error(f"invalid --sizes {args.sizes!r}")
        return EXIT_FLAGS
    with _output(args.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SIMULATION_HEADER)
        for row in simulate_rows(args.setting, grid, args.reps, args.seed, args.restarts, sizes):
            writer.writerow([row[0], f"{row[1]:g}", *row[2:5], f"{row[5]:.10f}", f"{row[6]:.10f}", row[7]])
            fh.flush()
    return EXIT_OK


# -- check ------------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    try:
        spec, _ = read_spec(args.spec)
    except (SpecError, OSError, UnicodeDecodeError) as exc:
        _error(str(exc))
        return EXIT_INPUT
    report = check_consistency(spec)
    print(report.summary())
    return EXIT_OK if report.satisfied else EXIT_VIOLATED


# -- entry point ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetmod", description="Community detection in networks with several node types.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect communities in a typed edge-list file")
    p.add_argument("input", help="TSV edge list: TYPE_A ID_A TYPE_B ID_B [WEIGHT]")
    p.add_argument("--restarts", type=int, default=100, help="random restarts (default: 100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=None, help="return exactly this many communities")
    p.add_argument("--oracle", action="store_true", help=f"also report the exact optimum (at most {MAX_PARTITION_NODES} nodes)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="planted-partition recovery sweep")
    p.add_argument("--setting", type=int, required=True, choices=sorted(SETTINGS))
    p.add_argument("--r3-grid", default=None, help='"a,b,c" or "start:stop:step" (default: the setting\'s range, step 0.025)')
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--sizes", default="600,300", help="node counts of the two types (default: 600,300)")
    p.add_argument("--out", default=None, help="CSV output file (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="check the consistency conditions of a block-model spec")
    p.add_argument("spec", help="key = value spec file")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "restarts", 1) < 1:
        _error("--restarts must be >= 1")
        return EXIT_FLAGS
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
