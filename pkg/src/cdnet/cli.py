"""Batch experiment runner: config files, sweeps, reproducible seeds, CSV/JSON emission.

The config is one JSON file with named blocks (topology, hardware, software,
protocol, run, plus users/thresholds for the Pareto stage and an analytic
block for closed-form grids). Parsing is strict: unknown keys are errors,
reported with the path of the offending key, so typos cannot silently fall
back to defaults. Every output file embeds the fully resolved configuration
(including the derived cutoff and the seed actually used), so any artifact can
be reproduced from its own header.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analytic, physics, stats, topology
from .pareto import ParetoPoint, optimal_region, pareto_frontier
from .protocol import SimulationParams


class ConfigError(ValueError):
    """Configuration problem; the message starts with the offending key path."""


# -- config parsing ------------------------------------------------------

_BLOCK_KEYS = {
    "topology": {"tree", "adjacency_file"},
    "hardware": {"p_gen", "f_new", "p_swap", "qubits_per_neighbor", "coherence_time"},
    "software": {"f_app", "max_swap_distance", "p_cons", "cutoff"},
    "protocol": {"q", "q_grid"},
    "run": {"realizations", "horizon", "window", "base_seed"},
    "analytic": {"p_gen", "p_cons", "r", "d"},
}
_TOP_KEYS = set(_BLOCK_KEYS) | {"users", "thresholds"}


def _require(config: dict, block: str):
    if block not in config:
        raise ConfigError(f"{block}: required block is missing")
    return config[block]


def _get(block: dict, path: str, key: str, kind, required: bool = True, default=None):
    if key not in block:
        if required:
            raise ConfigError(f"{path}.{key}: required key is missing")
        return default
    value = block[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected {kind.__name__}, got {value!r}")
    return value


def load_config(path) -> dict:
    """Read and structurally validate a config file (strict key checking)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: top level must be an object")
    for key in config:
        if key not in _TOP_KEYS:
            raise ConfigError(f"{key}: unknown key")
    for block_name, allowed in _BLOCK_KEYS.items():
        block = config.get(block_name)
        if block is None:
            continue
        if not isinstance(block, dict):
            raise ConfigError(f"{block_name}: expected an object")
        for key in block:
            if key not in allowed:
                raise ConfigError(f"{block_name}.{key}: unknown key")
    return config


def _build_topology(config: dict) -> topology.Topology:
    block = _require(config, "topology")
    if ("tree" in block) == ("adjacency_file" in block):
        raise ConfigError("topology: give exactly one of 'tree' or 'adjacency_file'")
    if "tree" in block:
        spec = block["tree"]
        if not (isinstance(spec, list) and len(spec) == 2 and all(isinstance(x, int) for x in spec)):
            raise ConfigError("topology.tree: expected [branching, levels]")
        try:
            return topology.tree_topology(*spec)
        except topology.TopologyError as exc:
            raise ConfigError(f"topology.tree: {exc}") from exc
    try:
        return topology.read_adjacency_file(block["adjacency_file"])
    except (OSError, topology.TopologyError) as exc:
        raise ConfigError(f"topology.adjacency_file: {exc}") from exc


def _build_params(config: dict, q: float) -> SimulationParams:
    hw_block = _require(config, "hardware")
    sw_block = _require(config, "software")
    try:
        return SimulationParams(
            topology=_build_topology(config),
            p_gen=_get(hw_block, "hardware", "p_gen", float),
            f_new=_get(hw_block, "hardware", "f_new", float),
            p_swap=_get(hw_block, "hardware", "p_swap", float),
            qubits_per_neighbor=_get(hw_block, "hardware", "qubits_per_neighbor", int),
            coherence_time=_get(hw_block, "hardware", "coherence_time", float),
            f_app=_get(sw_block, "software", "f_app", float),
            max_swap_distance=_get(sw_block, "software", "max_swap_distance", int),
            p_cons=_get(sw_block, "software", "p_cons", float),
            swap_attempt_prob=q,
            cutoff=_get(sw_block, "software", "cutoff", int, required=False),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"hardware/software: {exc}") from exc


def _q_values(config: dict) -> list[float]:
    block = _require(config, "protocol")
    if ("q" in block) == ("q_grid" in block):
        raise ConfigError("protocol: give exactly one of 'q' or 'q_grid'")
    if "q" in block:
        return [_get(block, "protocol", "q", float)]
    grid = block["q_grid"]
    if isinstance(grid, list):
        values = [float(x) for x in grid if isinstance(x, (int, float)) and not isinstance(x, bool)]
        if len(values) != len(grid):
            raise ConfigError("protocol.q_grid: entries must be numbers")
        return values
    if isinstance(grid, dict):
        extra = set(grid) - {"start", "stop", "step"}
        if extra:
            raise ConfigError(f"protocol.q_grid.{sorted(extra)[0]}: unknown key")
        start = _get(grid, "protocol.q_grid", "start", float)
        stop = _get(grid, "protocol.q_grid", "stop", float)
        step = _get(grid, "protocol.q_grid", "step", float)
        if step <= 0 or stop < start:
            raise ConfigError("protocol.q_grid: need step > 0 and stop >= start")
        count = int(round((stop - start) / step))
        return [round(start + i * step, 10) for i in range(count + 1)]
    raise ConfigError("protocol.q_grid: expected a list or {start, stop, step}")


def _run_settings(config: dict, params: SimulationParams, seed_override) -> dict:
    block = _require(config, "run")
    horizon = _get(block, "run", "horizon", int, required=False)
    window = _get(block, "run", "window", int, required=False)
    settings = {
        "realizations": _get(block, "run", "realizations", int),
        "horizon": horizon if horizon is not None else stats.DEFAULT_HORIZON_CUTOFFS * params.cutoff,
        "window": window if window is not None else stats.DEFAULT_WINDOW_CUTOFFS * params.cutoff,
        "base_seed": _get(block, "run", "base_seed", int, required=False, default=0),
    }
    if seed_override is not None:
        settings["base_seed"] = seed_override
    if settings["realizations"] < 1:
        raise ConfigError("run.realizations: must be >= 1")
    if settings["horizon"] < settings["window"] or settings["window"] < 2:
        raise ConfigError("run: need horizon >= window >= 2")
    return settings


def _users_and_thresholds(config: dict, n_nodes: int) -> tuple[list[int], list[float]]:
    users = config.get("users")
    thresholds = config.get("thresholds")
    if not isinstance(users, list) or not all(isinstance(u, int) for u in users) or not users:
        raise ConfigError("users: expected a non-empty list of node indices")
    if any(not 0 <= u < n_nodes for u in users):
        raise ConfigError(f"users: node indices must lie in 0..{n_nodes - 1}")
    if not isinstance(thresholds, list) or len(thresholds) != len(users):
        raise ConfigError("thresholds: expected one number per user")
    try:
        limits = [float(c) for c in thresholds]
    except (TypeError, ValueError):
        raise ConfigError("thresholds: entries must be numbers") from None
    return users, limits


def resolved_config(config: dict, params: SimulationParams | None, settings: dict | None) -> dict:
    """Input config plus every derived quantity needed to reproduce a run."""
    resolved = json.loads(json.dumps(config))
    if params is not None:
        resolved["resolved"] = {
            "cutoff": params.cutoff,
            "cutoff_bound": physics.max_cutoff(params.fidelity_params),
            "n_nodes": params.topology.n,
        }
        if settings is not None:
            resolved["resolved"].update(settings)
    return resolved


# -- subcommands ---------------------------------------------------------


def _write_with_header(path: Path, header: dict, body: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# config: {json.dumps(header, sort_keys=True)}\n")
        fh.write(body)


def cmd_analytic(config: dict, out_dir: Path) -> int:
    """Emit closed-form metrics, stationary distributions, and large-r limits."""
    block = _require(config, "analytic")
    grids = {}
    for key, kind in (("p_gen", float), ("p_cons", float), ("r", int), ("d", int)):
        raw = block.get(key, [1] if key == "d" else None)
        if raw is None:
            raise ConfigError(f"analytic.{key}: required key is missing")
        if not isinstance(raw, list):
            raise ConfigError(f"analytic.{key}: expected a list")
        try:
            grids[key] = [kind(x) for x in raw]
        except (TypeError, ValueError):
            raise ConfigError(f"analytic.{key}: entries must be {kind.__name__}s") from None

    header = resolved_config(config, None, None)
    metrics_rows = io.StringIO()
    dist_rows = io.StringIO()
    metrics_rows.write("p_gen,p_cons,r,d,v,k,v_over_d,k_over_d,v_limit,k_limit\n")
    dist_rows.write("p_gen,p_cons,r,w,probability\n")
    for p_gen in grids["p_gen"]:
        for p_cons in grids["p_cons"]:
            for r in grids["r"]:
                distribution = analytic.noswap_distribution(p_gen, p_cons, r)
                for w, prob in enumerate(distribution):
                    dist_rows.write(f"{p_gen!r},{p_cons!r},{r},{w},{prob!r}\n")
                try:
                    v_lim, k_lim = analytic.noswap_limits(1.0, p_gen, p_cons)
                    limits = (repr(v_lim), repr(k_lim))
                except ValueError:
                    limits = ("", "")
                for d in grids["d"]:
                    v = analytic.noswap_v(d, p_gen, p_cons, r)
                    k = analytic.noswap_k(d, p_gen, p_cons, r)
                    metrics_rows.write(
                        f"{p_gen!r},{p_cons!r},{r},{d},{v!r},{k!r},{v / d!r},{k / d!r},"
                        f"{limits[0] and repr(v_lim * d)},{limits[1] and repr(k_lim * d)}\n"
                    )
    _write_with_header(out_dir / "analytic_metrics.csv", header, metrics_rows.getvalue())
    _write_with_header(out_dir / "analytic_distribution.csv", header, dist_rows.getvalue())
    print(f"wrote {out_dir / 'analytic_metrics.csv'} and {out_dir / 'analytic_distribution.csv'}")
    return 0


def _detect_all(run: stats.MonteCarloRun, window: int) -> list[dict]:
    per_node = []
    for node, (v_series, k_series) in enumerate(zip(run.neighborhood, run.degree)):
        entry = {"node": node}
        for label, series in (("v", v_series), ("k", k_series)):
            result = stats.detect_steady_state(series, window)
            entry[label] = {
                "start_index": result.start_index,
                "aborted": result.aborted,
                "estimate": result.estimate,
                "standard_error": result.standard_error,
            }
            if result.aborted:
                print(f"warning: steady state not found for node {node} metric {label}", file=sys.stderr)
        per_node.append(entry)
    return per_node


def cmd_simulate(config: dict, out_dir: Path, seed_override, jobs: int) -> int:
    """Run one configuration; write the series CSV and a steady-state report."""
    q_values = _q_values(config)
    if len(q_values) != 1:
        raise ConfigError("protocol: simulate needs a single 'q' (use sweep for grids)")
    params = _build_params(config, q_values[0])
    settings = _run_settings(config, params, seed_override)
    header = resolved_config(config, params, settings)

    run = stats.run_realizations(
        params,
        settings["realizations"],
        horizon=settings["horizon"],
        base_seed=settings["base_seed"],
        jobs=jobs,
    )
    body = io.StringIO()
    stats.series_to_csv(run, body)
    _write_with_header(out_dir / "series.csv", header, body.getvalue())

    report = {"config": header, "nodes": _detect_all(run, settings["window"])}
    with open(out_dir / "steady_state.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out_dir / 'series.csv'} and {out_dir / 'steady_state.json'}")
    return 0


def cmd_sweep(config: dict, out_dir: Path, seed_override, jobs: int) -> int:
    """Run every q in the grid; one output row per q per node.

    Each q value reuses the same base seed, so rows depend only on their q and
    the sweep order does not matter.
    """
    q_values = _q_values(config)
    if not q_values:
        raise ConfigError("protocol.q_grid: grid must be non-empty")
    rows = []
    params = None
    settings = None
    for q in sorted(q_values):
        params = _build_params(config, q)
        settings = _run_settings(config, params, seed_override)
        run = stats.run_realizations(
            params,
            settings["realizations"],
            horizon=settings["horizon"],
            base_seed=settings["base_seed"],
            jobs=jobs,
        )
        for entry in _detect_all(run, settings["window"]):
            rows.append(
                {
                    "q": q,
                    "node": entry["node"],
                    "v_estimate": entry["v"]["estimate"],
                    "v_error": entry["v"]["standard_error"],
                    "v_start": entry["v"]["start_index"],
                    "v_aborted": entry["v"]["aborted"],
                    "k_estimate": entry["k"]["estimate"],
                    "k_error": entry["k"]["standard_error"],
                    "k_start": entry["k"]["start_index"],
                    "k_aborted": entry["k"]["aborted"],
                }
            )
    header = resolved_config(config, params, settings)
    body = io.StringIO()
    fields = list(rows[0].keys())
    writer = csv.DictWriter(body, fieldnames=fields)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    _write_with_header(out_dir / "sweep.csv", header, body.getvalue())
    print(f"wrote {out_dir / 'sweep.csv'}")
    return 0


def read_sweep_csv(path) -> list[dict]:
    """Rows of a sweep CSV produced by this tool ('#' header lines skipped)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def cmd_pareto(config: dict, sweep_path, out_dir: Path) -> int:
    """Annotate a sweep table with frontier and optimal-region membership."""
    rows = read_sweep_csv(sweep_path)
    if not rows:
        raise ConfigError(f"{sweep_path}: sweep table is empty")
    required = {"q", "node", "v_estimate"}
    missing = required - set(rows[0])
    if missing:
        raise ConfigError(f"{sweep_path}: missing columns {sorted(missing)}")
    n_nodes = 1 + max(int(row["node"]) for row in rows)
    users, thresholds = _users_and_thresholds(config, n_nodes)

    by_q: dict[float, dict[int, float]] = {}
    for row in rows:
        by_q.setdefault(float(row["q"]), {})[int(row["node"])] = float(row["v_estimate"])
    points = []
    for q, values in sorted(by_q.items()):
        absent = [u for u in users if u not in values]
        if absent:
            raise ConfigError(f"{sweep_path}: no rows for user nodes {absent} at q={q}")
        points.append(ParetoPoint(theta=q, objectives=tuple(values[u] for u in users)))

    in_frontier = {p.theta for p in pareto_frontier(points)}
    in_region = {p.theta for p in optimal_region(points, thresholds)}
    if not in_region:
        print("warning: the optimal region is empty for these thresholds", file=sys.stderr)

    header = resolved_config(config, None, None)
    body = io.StringIO()
    fields = list(rows[0].keys()) + ["in_frontier", "in_optimal_region"]
    writer = csv.DictWriter(body, fieldnames=fields)
    writer.writeheader()
    for row in rows:
        q = float(row["q"])
        writer.writerow({**row, "in_frontier": q in in_frontier, "in_optimal_region": q in in_region})
    _write_with_header(out_dir / "pareto.csv", header, body.getvalue())
    print(f"wrote {out_dir / 'pareto.csv'}")
    return 0


# -- entry point ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdnet",
        description="Continuous entanglement distribution: simulation and analysis runner.",
    )
    parser.add_argument("--config", required=True, help="path to the JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override run.base_seed")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for realizations")
    parser.add_argument("--out", default=".", help="output directory (created if missing)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", help="closed-form no-swap metrics over a parameter grid")
    sub.add_parser("simulate", help="Monte Carlo run at a single q, with steady-state report")
    sub.add_parser("sweep", help="Monte Carlo runs over a q grid")
    pareto_parser = sub.add_parser("pareto", help="annotate a sweep table with Pareto membership")
    pareto_parser.add_argument("--sweep", required=True, help="sweep.csv produced by the sweep command")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.jobs < 1:
            raise ConfigError("--jobs: must be >= 1")
        if args.command == "analytic":
            return cmd_analytic(config, out_dir)
        if args.command == "simulate":
            return cmd_simulate(config, out_dir, args.seed, args.jobs)
        if args.command == "sweep":
            return cmd_sweep(config, out_dir, args.seed, args.jobs)
        return cmd_pareto(config, args.sweep, out_dir)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
