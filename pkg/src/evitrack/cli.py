"""Batch front door.

Every subcommand loads files, runs one library operation, and prints
exactly one JSON document to stdout; logs and errors go to stderr.
Exit codes: 0 success, 2 input error, 3 analysis precondition failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (
    AnalysisLimitError,
    count_intervals,
    counts_to_dict,
    evidence_region,
    ranked_paths,
    ranking_to_dict,
)
from .connection import build_graph, graph_to_dict
from .evidence import TotalConflictError
from .evidence_map import field_to_dict, init_grid, snapshot
from .geometry import NavigationError, shortest_path
from .params import resolve_params
from .scenario import (
    Scenario,
    SchemaError,
    canonical_json,
    load_scenario,
    resolve_type,
    scenario_to_dict,
    simulate,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise SchemaError("args", message)


def _parse_point(raw: str, where: str) -> tuple[float, float]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise SchemaError(where, "expected x,y")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise SchemaError(where, "expected numbers") from exc


def _parse_rect(raw: str) -> tuple[float, float, float, float]:
    parts = raw.split(",")
    if len(parts) != 4:
        raise SchemaError("rect", "expected x0,y0,x1,y1")
    try:
        x0, y0, x1, y1 = (float(p) for p in parts)
    except ValueError as exc:
        raise SchemaError("rect", "expected numbers") from exc
    return x0, y0, x1, y1


def _parse_window(raw: str | None) -> tuple[int, int] | None:
    if raw is None:
        return None
    parts = raw.split(",")
    if len(parts) != 2:
        raise SchemaError("window", "expected t0,t1")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise SchemaError("window", "expected integer milliseconds") from exc


def _write_out(doc: dict, out: str | None) -> None:
    if out is not None:
        Path(out).write_text(canonical_json(doc), encoding="utf-8")


def _cmd_simulate(args: argparse.Namespace) -> dict:
    cfg_path = Path(args.config)
    try:
        config = json.loads(cfg_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError("config", f"invalid JSON: {exc}") from exc
    scenario = simulate(config, seed=args.seed, base_dir=cfg_path.parent)
    doc = scenario_to_dict(scenario)
    _write_out(doc, args.out)
    return doc


def _load(args: argparse.Namespace) -> Scenario:
    return load_scenario(args.scenario)


def _cmd_graph(args: argparse.Namespace) -> dict:
    scenario = _load(args)
    graph = build_graph(scenario, type_assumption=args.type)
    doc = graph_to_dict(graph, threshold=args.threshold)
    _write_out(doc, args.out)
    return doc


def _cmd_paths(args: argparse.Namespace) -> dict:
    scenario = _load(args)
    overrides = {} if args.beam is None else {"beam_width": args.beam}
    params = resolve_params(scenario.assumptions, **overrides)
    graph = build_graph(scenario, type_assumption=args.type, params=params)
    ranking = ranked_paths(
        scenario,
        graph,
        n_subs=args.n_subs,
        top_n=args.top,
        params=params,
        allow_beam=args.beam is not None,
    )
    return ranking_to_dict(ranking)


def _cmd_counts(args: argparse.Namespace) -> dict:
    scenario = _load(args)
    graph = build_graph(scenario, type_assumption=args.type)
    return counts_to_dict(count_intervals(scenario, graph))


def _cmd_region(args: argparse.Namespace) -> dict:
    scenario = _load(args)
    iv = evidence_region(
        scenario, _parse_rect(args.rect), _parse_window(args.window)
    )
    return {"interval": [iv.support, iv.plausibility]}


def _cmd_evmap(args: argparse.Namespace) -> dict:
    scenario = _load(args)
    overrides = {} if args.cell is None else {"cell_size_m": args.cell}
    params = resolve_params(scenario.assumptions, **overrides)
    sub = resolve_type(scenario, args.type)
    active = [r for r in scenario.reports if not r.flagged_false]
    grid = init_grid(scenario.navmap, sub, params)
    grid.history = active
    t = args.t
    if t is None:
        if not active:
            raise SchemaError("t", "scenario has no reports; pass --t")
        t = max(r.time for r in active)
    snap = snapshot(grid, t, scenario.sensors)
    doc = field_to_dict(snap)
    _write_out(doc, args.out)
    return doc


def _cmd_shortest(args: argparse.Namespace) -> dict:
    scenario = _load(args)
    sub = resolve_type(scenario, args.type)
    path = shortest_path(
        scenario.navmap,
        _parse_point(args.frm, "from"),
        _parse_point(args.to, "to"),
        sub.draught_m,
    )
    return {
        "waypoints": [[p[0], p[1]] for p in path.waypoints],
        "length_m": path.length_m,
    }


def _cmd_serve(args: argparse.Namespace) -> dict | None:
    from .service import load_config, serve

    serve(load_config(args.config))
    return None


def _cmd_report(args: argparse.Namespace) -> dict:
    from .report import render_report

    scenario = _load(args)
    return render_report(
        scenario, args.out_dir, type_id=args.type, t_ms=args.t
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="evitrack")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a scenario from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("graph", help="pairwise link evidence graph")
    p.add_argument("--scenario", required=True)
    p.add_argument("--type")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_graph)

    p = sub.add_parser("paths", help="ranked most-plausible paths")
    p.add_argument("--scenario", required=True)
    p.add_argument("--n-subs", type=int, dest="n_subs")
    p.add_argument("--top", type=int)
    p.add_argument("--beam", type=int, help="enable beam mode with this width")
    p.add_argument("--type")
    p.set_defaults(handler=_cmd_paths)

    p = sub.add_parser("counts", help="boat-count evidence intervals")
    p.add_argument("--scenario", required=True)
    p.add_argument("--type")
    p.set_defaults(handler=_cmd_counts)

    p = sub.add_parser("region", help="evidence for a boat inside a rectangle")
    p.add_argument("--scenario", required=True)
    p.add_argument("--rect", required=True)
    p.add_argument("--window")
    p.set_defaults(handler=_cmd_region)

    p = sub.add_parser("evmap", help="evidence map field export")
    p.add_argument("--scenario", required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--cell", type=float)
    p.add_argument("--type")
    p.add_argument("--out")
    p.set_defaults(handler=_cmd_evmap)

    p = sub.add_parser("shortest", help="shortest navigable route")
    p.add_argument("--scenario", required=True)
    p.add_argument("--from", required=True, dest="frm")
    p.add_argument("--to", required=True)
    p.add_argument("--type")
    p.set_defaults(handler=_cmd_shortest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_serve)

    p = sub.add_parser(
        "report", help="render figures and tables for a scenario"
    )
    p.add_argument("--scenario", required=True)
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--type")
    p.add_argument("--t", type=int)
    p.set_defaults(handler=_cmd_report)

    return parser


def _fail(code: int, message: str, field: str | None = None) -> int:
    payload = {"error": message}
    if field is not None:
        payload["field"] = field
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        doc = args.handler(args)
    except SchemaError as exc:
        return _fail(2, str(exc), exc.field)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(2, str(exc))
    except (AnalysisLimitError, TotalConflictError, NavigationError) as exc:
        return _fail(3, str(exc))
    except ValueError as exc:
        return _fail(3, str(exc))
    if doc is not None:
        sys.stdout.write(canonical_json(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
