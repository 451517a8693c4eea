"""``percothresh`` command line.

Exit codes: 0 success, 1 usage error, 2 input error, 3 solver
non-convergence, 4 degenerate simulation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .generators import BaConfig, ForestFireConfig, barabasi_albert, forest_fire, ring, triangle_ring
from .graph import Graph, GraphParseError, load_edge_list, serialize_edge_list
from .percolation import DEFAULT_GRID, DEFAULT_RUNS, DegenerateCurveError
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL
from .thresholds import EstimateOptions

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_SOLVER, EXIT_DEGENERATE = 0, 1, 2, 3, 4

MODELS = ("ring", "triangle-ring", "forest-fire", "ba")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_orders(text: str) -> list[int]:
    """``"0,1,2"`` or ``"0..5"`` (inclusive) or a mix such as ``"0,2..4"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError(f"empty order range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 0:
        raise ValueError(f"bad order list {text!r}")
    return out


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("graph source")
    src.add_argument("--input", type=Path, help="edge-list file")
    src.add_argument("--dataset", choices=ex.BUNDLED, help="bundled network")
    src.add_argument("--model", choices=MODELS, help="synthetic model")
    src.add_argument("--n", type=int, help="model size (ring length for triangle-ring)")
    src.add_argument("--q", type=str, default="0.01", help="burning probability (list for sweeps)")
    src.add_argument("--m", type=int, default=2, help="edges per new node for ba")
    common.add_argument("--orders", type=parse_orders, default=[0, 1, 2])
    common.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    common.add_argument("--grid", type=int, default=DEFAULT_GRID)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    common.add_argument("--fast", choices=("auto", "on", "off"), default="auto")
    common.add_argument("--out", type=Path, help="output path (stdout if omitted)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="percothresh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("estimate", parents=[common], help="spectral threshold estimates")
    sim = sub.add_parser("simulate", parents=[common], help="Newman-Ziff curves and p_c")
    sim.add_argument("--summary", type=Path, help="JSON summary path (csv output only)")
    ff = sub.add_parser("forest-fire", parents=[common], help="forest-fire trace or sweep")
    ff.add_argument("--mode", choices=("trace", "sweep"), default="trace")
    ff.add_argument("--checkpoints", type=int, default=12)
    ff.add_argument("--networks", type=int, default=100)
    tab = sub.add_parser("table", parents=[common], help="estimates for a manifest of networks")
    tab.add_argument("--manifest", type=Path, help="JSON name->file map (bundled if omitted)")
    tab.add_argument("--pc-bins", type=int, default=8)
    tab.add_argument("--degree-bins", type=int, default=7)
    tab.add_argument("--summary", type=Path, help="JSON summary path")
    sub.add_parser("generate", parents=[common], help="write a synthetic graph as an edge list")
    return parser


def load_graph(args) -> tuple[str, Graph]:
    chosen = [x for x in (args.input, args.dataset, args.model) if x is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --input, --dataset or --model")
    if args.input is not None:
        return args.input.stem, load_edge_list(args.input)
    if args.dataset is not None:
        return args.dataset, ex.bundled_graph(args.dataset)
    if args.n is None:
        raise UsageError("--model needs --n")
    try:
        if args.model == "ring":
            return f"ring{args.n}", ring(args.n)
        if args.model == "triangle-ring":
            return f"triangle_ring{args.n}", triangle_ring(args.n)
        if args.model == "forest-fire":
            q = _floats(args.q)[0]
            return f"forest_fire_q{q}", forest_fire(ForestFireConfig(args.n, q, args.seed))
        return f"ba{args.n}_m{args.m}", barabasi_albert(BaConfig(args.n, args.m, args.seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _options(args) -> EstimateOptions:
    return EstimateOptions(tol=args.tol, max_iter=args.max_iter, fast=args.fast)


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def cmd_estimate(args) -> int:
    name, g = load_graph(args)
    row = ex.estimate_row(name, g, args.orders, _options(args))
    if args.format == "json":
        _emit(json.dumps({"schema": ex.TABLE_SCHEMA, **row.to_dict()}, indent=2) + "\n", args.out)
    else:
        _emit(ex.table_csv([row], args.orders), args.out)
    return EXIT_SOLVER if row.failure else EXIT_OK


def cmd_simulate(args) -> int:
    _, g = load_graph(args)
    if args.runs < 1 or args.grid < 2:
        raise UsageError("--runs must be >= 1 and --grid >= 2")
    curve, summary = ex.simulate(g, args.runs, args.grid, args.seed)
    if args.format == "json":
        payload = dict(summary, p=curve.p_grid.tolist(), s1=curve.s1.tolist(), s2=curve.s2.tolist())
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(curve.to_csv(), args.out)
        text = json.dumps(summary, indent=2) + "\n"
        if args.summary is not None:
            args.summary.write_text(text, encoding="utf-8")
        else:
            sys.stderr.write(text)
    return EXIT_OK


def cmd_forest_fire(args) -> int:
    if args.n is None:
        raise UsageError("forest-fire needs --n")
    qs = _floats(args.q)
    opts = _options(args)
    if args.mode == "trace":
        records = []
        for q in qs:
            cps = ex.log_checkpoints(args.n, args.checkpoints)
            records += ex.forest_fire_trace(q, args.n, args.seed, cps, args.orders,
                                            args.runs, args.grid, opts)
    else:
        records = ex.forest_fire_sweep(qs, args.n, args.networks, args.seed, args.orders,
                                       args.runs, args.grid, opts)
    if args.format == "json":
        _emit(json.dumps({"schema": ex.TRACE_SCHEMA, "mode": args.mode, "rows": records},
                         indent=2) + "\n", args.out)
    else:
        _emit(ex.records_csv(records, ex.TRACE_SCHEMA), args.out)
    return EXIT_OK


def cmd_table(args) -> int:
    manifest = args.manifest or ex.bundled_manifest()
    rows = ex.run_table(manifest, args.orders, args.runs, args.grid, args.seed, _options(args))
    summary = ex.table_summary(rows, args.orders, args.pc_bins, args.degree_bins)
    if args.format == "json":
        _emit(json.dumps({**summary, "rows": [r.to_dict() for r in rows]}, indent=2) + "\n",
              args.out)
    else:
        _emit(ex.table_csv(rows, args.orders), args.out)
        if args.summary is not None:
            args.summary.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.model is None:
        raise UsageError("generate needs --model")
    _, g = load_graph(args)
    _emit(f"% {g.node_count} nodes, {g.edge_count} edges\n" + serialize_edge_list(g), args.out)
    return EXIT_OK


COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "forest-fire": cmd_forest_fire,
    "table": cmd_table,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"percothresh: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphParseError) as exc:
        print(f"percothresh: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateCurveError as exc:
        print(f"percothresh: degenerate simulation: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
