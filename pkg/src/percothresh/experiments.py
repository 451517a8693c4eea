"""Experiment pipelines behind the command line: estimates, simulations,
forest-fire traces and sweeps, and multi-network tables."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .generators import ForestFireConfig, forest_fire
from .graph import Graph, largest_connected_component, load_edge_list, parse_edge_list
from .percolation import empirical_threshold, percolation_curves
from .rng import GENERATION
from .thresholds import (
    ConvergenceError,
    EstimateOptions,
    ThresholdEstimate,
    compare,
    estimate_pc,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TABLE_SCHEMA = f"percothresh.table/{SCHEMA_VERSION}"
TRACE_SCHEMA = f"percothresh.forest-fire/{SCHEMA_VERSION}"
SIM_SCHEMA = f"percothresh.simulate/{SCHEMA_VERSION}"

BUNDLED = ("karate", "contiguous_usa")


def bundled_graph(name: str) -> Graph:
    """One of the small public networks shipped with the package."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled network {name!r}; choose from {', '.join(BUNDLED)}")
    text = resources.files("percothresh").joinpath("data", f"{name}.txt").read_text("utf-8")
    return parse_edge_list(text)


def bundled_manifest() -> Path:
    return Path(str(resources.files("percothresh").joinpath("data", "manifest.json")))


@dataclass
class ResultRow:
    network: str
    nodes: int
    edges: int
    estimates: dict[int, float | None] = field(default_factory=dict)
    methods: dict[int, str] = field(default_factory=dict)
    empirical: float | None = None
    errors: dict[int, float] = field(default_factory=dict)
    failure: str | None = None

    def columns(self, orders: list[int]) -> list:
        out = [self.network, self.nodes, self.edges]
        out += [_fmt(self.estimates.get(o)) for o in orders]
        out.append(_fmt(self.empirical))
        out += [_fmt(self.errors.get(o)) for o in orders]
        out += [self.methods.get(o, "") for o in orders]
        out.append(self.failure or "")
        return out

    def to_dict(self) -> dict:
        return {
            "network": self.network,
            "nodes": self.nodes,
            "edges": self.edges,
            "pc": {str(k): v for k, v in self.estimates.items()},
            "method": {str(k): v for k, v in self.methods.items()},
            "empirical_pc": self.empirical,
            "relative_error": {str(k): v for k, v in self.errors.items()},
            "failure": self.failure,
        }


def table_header(orders: list[int]) -> list[str]:
    return (["network", "nodes", "edges"] + [f"pc{o}" for o in orders] + ["pc_empirical"]
            + [f"rel_err{o}" for o in orders] + [f"method{o}" for o in orders] + ["failure"])


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def estimate_row(name: str, g: Graph, orders: list[int],
                 opts: EstimateOptions | None = None) -> ResultRow:
    """Largest component, then one estimate per requested order.

    A solver failure at one order is recorded in ``failure`` and the other
    orders are still reported.
    """
    g, _ = largest_connected_component(g)
    row = ResultRow(name, g.node_count, g.edge_count)
    failures = []
    for order in orders:
        try:
            est = estimate_pc(g, order, opts)
        except ConvergenceError as exc:
            row.estimates[order] = None
            row.methods[order] = exc.result.method
            failures.append(str(exc))
            continue
        row.estimates[order] = est.pc
        row.methods[order] = est.method
    if failures:
        row.failure = "; ".join(failures)
    return row


def attach_empirical(row: ResultRow, empirical: float) -> None:
    row.empirical = empirical
    ests = [ThresholdEstimate(o, 0.0, pc, False, row.methods.get(o, ""))
            for o, pc in row.estimates.items() if pc is not None]
    row.errors = compare(ests, empirical).relative_errors


def simulate(g: Graph, runs: int, grid: int, seed: int):
    """Curve and summary for the largest component of ``g``."""
    g, _ = largest_connected_component(g)
    curve = percolation_curves(g, runs=runs, grid_size=grid, seed=seed)
    pc, resolution = empirical_threshold(curve)
    summary = {
        "schema": SIM_SCHEMA,
        "nodes": g.node_count,
        "edges": g.edge_count,
        "pc": pc,
        "resolution": resolution,
        "runs": runs,
        "grid": grid,
        "seed": seed,
    }
    return curve, summary


def log_checkpoints(n: int, count: int, start: int = 10) -> list[int]:
    """About ``count`` log-spaced node counts ending at ``n``."""
    start = min(start, n)
    pts = np.unique(np.round(np.geomspace(start, n, count)).astype(int))
    return [int(x) for x in pts]


def forest_fire_trace(q: float, n: int, seed: int, checkpoints: list[int],
                      orders: list[int], runs: int, grid: int,
                      opts: EstimateOptions | None = None) -> list[dict]:
    """Estimates along the growth of one forest-fire network.

    The network after ``t`` arrivals is the induced subgraph on its first
    ``t`` nodes, so one generation serves every checkpoint.
    """
    full = forest_fire(ForestFireConfig(n, q, seed))
    rows = []
    for t in checkpoints:
        g, _ = full.subgraph(range(t))
        rec = {"q": q, "nodes": t, "edges": g.edge_count}
        row = estimate_row(f"t={t}", g, orders, opts)
        for o in orders:
            rec[f"pc{o}"] = row.estimates.get(o)
        if runs > 0 and g.edge_count > 0:
            try:
                _, summ = simulate(g, runs, grid, seed)
                rec["pc_empirical"] = summ["pc"]
            except ValueError:
                rec["pc_empirical"] = None
        rows.append(rec)
    return rows


def forest_fire_sweep(qs: list[float], n: int, networks: int, seed: int,
                      orders: list[int], runs: int, grid: int,
                      opts: EstimateOptions | None = None) -> list[dict]:
    """Per burning probability, estimates averaged over ``networks`` graphs."""
    rows = []
    for qi, q in enumerate(qs):
        seeds = np.random.SeedSequence(int(seed), spawn_key=(GENERATION, qi)).generate_state(
            networks, dtype=np.uint64)
        acc: dict[str, list[float]] = {f"pc{o}": [] for o in orders}
        acc["pc_empirical"] = []
        acc["edges"] = []
        for s in seeds:
            g = forest_fire(ForestFireConfig(n, q, int(s)))
            row = estimate_row("ff", g, orders, opts)
            acc["edges"].append(g.edge_count)
            for o in orders:
                if row.estimates.get(o) is not None:
                    acc[f"pc{o}"].append(row.estimates[o])
            if runs > 0:
                _, summ = simulate(g, runs, grid, int(s))
                acc["pc_empirical"].append(summ["pc"])
        rec = {"q": q, "nodes": n, "networks": networks}
        for k, vals in acc.items():
            rec[k] = float(np.mean(vals)) if vals else None
        rows.append(rec)
    return rows


def read_manifest(path: str | Path) -> list[tuple[str, Path]]:
    """``{"name": "relative/or/absolute/path", ...}`` -> [(name, path)] in file order."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, dict):
        raise ValueError("manifest must be a JSON object mapping names to edge-list files")
    return [(name, (path.parent / rel).resolve()) for name, rel in entries.items()]


def run_table(manifest: str | Path, orders: list[int], runs: int, grid: int, seed: int,
              opts: EstimateOptions | None = None) -> list[ResultRow]:
    rows = []
    for name, file in read_manifest(manifest):
        try:
            g = load_edge_list(file)
        except (OSError, ValueError) as exc:
            rows.append(ResultRow(name, 0, 0, failure=f"load failed: {exc}"))
            continue
        row = estimate_row(name, g, orders, opts)
        if runs > 0:
            try:
                _, summ = simulate(g, runs, grid, seed)
                attach_empirical(row, summ["pc"])
            except ValueError as exc:
                row.failure = "; ".join(filter(None, [row.failure, f"simulation: {exc}"]))
        rows.append(row)
    return rows


def binned_errors(rows: list[ResultRow], orders: list[int], key: str, bins: int) -> list[dict]:
    """Mean relative error per order in equal-width bins of ``key``.

    ``key`` is ``"pc"`` (empirical threshold) or ``"degree"`` (average degree).
    """
    usable = [r for r in rows if r.empirical is not None and r.errors]
    if not usable:
        return []
    xs = np.array([r.empirical if key == "pc" else 2.0 * r.edges / r.nodes for r in usable])
    lo, hi = float(xs.min()), float(xs.max())
    edges = np.linspace(lo, hi, bins + 1) if hi > lo else np.array([lo, lo + 1.0])
    idx = np.clip(np.searchsorted(edges, xs, side="right") - 1, 0, len(edges) - 2)
    out = []
    for b in range(len(edges) - 1):
        members = [r for r, i in zip(usable, idx) if i == b]
        if not members:
            continue
        rec = {"bin": b, "lower": float(edges[b]), "upper": float(edges[b + 1]),
               "count": len(members),
               "mean_x": float(np.mean([x for x, i in zip(xs, idx) if i == b]))}
        for o in orders:
            vals = [r.errors[o] for r in members if o in r.errors]
            rec[f"rel_err{o}"] = float(np.mean(vals)) if vals else None
        out.append(rec)
    return out


def table_summary(rows: list[ResultRow], orders: list[int], pc_bins: int = 8,
                  degree_bins: int = 7) -> dict:
    mean_err = {}
    for o in orders:
        vals = [r.errors[o] for r in rows if o in r.errors]
        mean_err[str(o)] = float(np.mean(vals)) if vals else None
    return {
        "schema": TABLE_SCHEMA,
        "networks": len(rows),
        "mean_relative_error": mean_err,
        "by_empirical_pc": binned_errors(rows, orders, "pc", pc_bins),
        "by_average_degree": binned_errors(rows, orders, "degree", degree_bins),
    }


def table_csv(rows: list[ResultRow], orders: list[int]) -> str:
    out = io.StringIO()
    out.write(f"# schema={TABLE_SCHEMA}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(table_header(orders))
    for r in rows:
        w.writerow(r.columns(orders))
    return out.getvalue()


def records_csv(records: list[dict], schema: str) -> str:
    out = io.StringIO()
    out.write(f"# schema={schema}\n")
    if records:
        keys = list(records[0])
        w = csv.writer(out, lineterminator="\n")
        w.writerow(keys)
        for rec in records:
            w.writerow([_fmt(rec[k]) if isinstance(rec[k], float) else
                        ("" if rec[k] is None else rec[k]) for k in keys])
    return out.getvalue()
