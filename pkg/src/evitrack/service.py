"""HTTP facade over scenarios and analyses.

One process holds scenarios in memory. Each scenario carries a
monotonically increasing snapshot token: mutations swap in a fresh
immutable scenario value and bump the token, reads may pin a token and
get a defined conflict when it has gone stale. No auth, no persistence
beyond the scenario files the caller manages.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analysis import (
    AnalysisLimitError,
    count_intervals,
    counts_to_dict,
    evidence_region,
    incident_start,
    ranked_paths,
    ranking_to_dict,
)
from .connection import build_graph, graph_to_dict
from .evidence import TotalConflictError
from .evidence_map import field_to_dict, init_grid, snapshot
from .geometry import NavigationError, shortest_path
from .params import PARAM_NAMES, Params, resolve_params
from .scenario import (
    Scenario,
    SchemaError,
    ingest_ndjson,
    ingest_report,
    resolve_type,
    scenario_from_dict,
    scenario_to_dict,
)

log = logging.getLogger("evitrack.service")

_INT_PARAMS = {"exact_limit", "beam_width", "hypothesis_cap", "focal_cap",
               "snap_radius_cells"}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    scenario_dir: str | None = None
    log_level: str = "info"
    params: dict = field(default_factory=dict)


def load_config(path: str | Path | None = None) -> ServiceConfig:
    """Service settings from an optional JSON file, then EVITRACK_*
    environment overrides on top."""
    cfg = ServiceConfig()
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        for key in doc:
            if key not in {"host", "port", "scenario_dir", "log_level", "params"}:
                raise SchemaError(key, "unknown service config key")
        cfg.host = str(doc.get("host", cfg.host))
        cfg.port = int(doc.get("port", cfg.port))
        cfg.scenario_dir = doc.get("scenario_dir", cfg.scenario_dir)
        cfg.log_level = str(doc.get("log_level", cfg.log_level))
        params = doc.get("params", {})
        if not isinstance(params, Mapping):
            raise SchemaError("params", "must be an object")
        for name in params:
            if name not in PARAM_NAMES:
                raise SchemaError(f"params.{name}", "unknown parameter")
        cfg.params = dict(params)
    if "EVITRACK_HOST" in os.environ:
        cfg.host = os.environ["EVITRACK_HOST"]
    if "EVITRACK_PORT" in os.environ:
        cfg.port = int(os.environ["EVITRACK_PORT"])
    if "EVITRACK_SCENARIO_DIR" in os.environ:
        cfg.scenario_dir = os.environ["EVITRACK_SCENARIO_DIR"]
    if "EVITRACK_LOG_LEVEL" in os.environ:
        cfg.log_level = os.environ["EVITRACK_LOG_LEVEL"]
    for name in sorted(PARAM_NAMES):
        env = "EVITRACK_" + name.upper()
        if env in os.environ:
            raw = os.environ[env]
            cfg.params[name] = int(raw) if name in _INT_PARAMS else float(raw)
    return cfg


class _NotFound(KeyError):
    pass


class _Stale(ValueError):
    def __init__(self, current: int):
        super().__init__("stale snapshot token")
        self.current = current


class _State:
    """One scenario slot: (token, scenario) swaps atomically; the lock
    serializes writers only."""

    __slots__ = ("current", "lock")

    def __init__(self, scenario: Scenario):
        self.current: tuple[int, Scenario] = (1, scenario)
        self.lock = threading.Lock()


class Store:
    def __init__(self) -> None:
        self._items: dict[str, _State] = {}
        self._lock = threading.Lock()

    def create(self, scenario: Scenario) -> int:
        with self._lock:
            if scenario.id in self._items:
                raise _Stale(self._items[scenario.id].current[0])
            self._items[scenario.id] = _State(scenario)
        return 1

    def get(self, sid: str, token: int | None = None) -> tuple[int, Scenario, _State]:
        state = self._items.get(sid)
        if state is None:
            raise _NotFound(sid)
        cur_token, scenario = state.current
        if token is not None and token != cur_token:
            raise _Stale(cur_token)
        return cur_token, scenario, state


def _clone(scenario: Scenario) -> Scenario:
    return dataclasses.replace(scenario, reports=list(scenario.reports))


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    base_params = resolve_params({}, **config.params)
    store = Store()
    app = FastAPI(title="evitrack", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.config = config

    @app.middleware("http")
    async def _log_requests(request: Request, call_next):
        t0 = time.monotonic()
        response = await call_next(request)
        log.info(
            "%s",
            json.dumps(
                {
                    "method": request.method,
                    "path": request.url.path,
                    "query": str(request.url.query),
                    "status": response.status_code,
                    "duration_ms": round((time.monotonic() - t0) * 1000, 1),
                },
                sort_keys=True,
            ),
        )
        return response

    @app.exception_handler(SchemaError)
    async def _schema_error(request, exc: SchemaError):
        return JSONResponse(
            status_code=400, content={"error": str(exc), "field": exc.field}
        )

    @app.exception_handler(_NotFound)
    async def _not_found(request, exc: _NotFound):
        return JSONResponse(
            status_code=404, content={"error": f"unknown scenario {exc.args[0]!r}"}
        )

    @app.exception_handler(_Stale)
    async def _stale(request, exc: _Stale):
        return JSONResponse(
            status_code=409, content={"error": str(exc), "token": exc.current}
        )

    @app.exception_handler(AnalysisLimitError)
    async def _limit(request, exc: AnalysisLimitError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(TotalConflictError)
    async def _conflict(request, exc: TotalConflictError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(NavigationError)
    async def _navigation(request, exc: NavigationError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    def _params_for(scenario: Scenario, **overrides) -> Params:
        return resolve_params(scenario.assumptions, base=base_params, **overrides)

    def _respond(payload, token: int, status: int = 200) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content=payload,
            headers={"X-Snapshot-Token": str(token)},
        )

    async def _body_json(request: Request) -> dict:
        raw = await request.body()
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError("body", f"invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise SchemaError("body", "expected a JSON object")
        return doc

    @app.post("/scenarios", status_code=201)
    async def post_scenario(request: Request):
        doc = await _body_json(request)
        scenario = scenario_from_dict(doc, base_dir=config.scenario_dir)
        token = store.create(scenario)
        return _respond({"id": scenario.id, "token": token}, token, status=201)

    @app.get("/scenarios/{sid}")
    def get_scenario(sid: str, token: int | None = None):
        cur, scenario, _ = store.get(sid, token)
        return _respond(scenario_to_dict(scenario), cur)

    @app.put("/scenarios/{sid}")
    async def put_scenario(sid: str, request: Request, token: int | None = None):
        doc = await _body_json(request)
        _, _, state = store.get(sid, token)
        scenario = scenario_from_dict(doc, base_dir=config.scenario_dir)
        if scenario.id != sid:
            raise SchemaError("id", "scenario id must match the URL")
        with state.lock:
            cur, _ = state.current
            state.current = (cur + 1, scenario)
            new_token = cur + 1
        return _respond({"id": sid, "token": new_token}, new_token)

    @app.post("/scenarios/{sid}/reports")
    async def post_reports(sid: str, request: Request, token: int | None = None):
        raw = (await request.body()).decode("utf-8")
        _, _, state = store.get(sid, token)
        with state.lock:
            cur, scenario = state.current
            fresh = _clone(scenario)
            stripped = raw.strip()
            if "\n" in stripped or not stripped.startswith("{"):
                added = ingest_ndjson(fresh, raw)
            else:
                doc = json.loads(stripped)
                added = [ingest_report(fresh, doc)]
            state.current = (cur + 1, fresh)
            new_token = cur + 1
        return _respond(
            {"added": [r.id for r in added], "token": new_token}, new_token
        )

    @app.post("/scenarios/{sid}/flags")
    async def post_flag(sid: str, request: Request, token: int | None = None):
        doc = await _body_json(request)
        report_id = doc.get("report_id")
        flagged = doc.get("flagged_false")
        if not isinstance(report_id, str):
            raise SchemaError("report_id", "required string")
        if not isinstance(flagged, bool):
            raise SchemaError("flagged_false", "required boolean")
        _, _, state = store.get(sid, token)
        with state.lock:
            cur, scenario = state.current
            if all(r.id != report_id for r in scenario.reports):
                raise SchemaError("report_id", f"unknown report {report_id!r}")
            reports = [
                dataclasses.replace(r, flagged_false=flagged)
                if r.id == report_id
                else r
                for r in scenario.reports
            ]
            state.current = (
                cur + 1,
                dataclasses.replace(scenario, reports=reports),
            )
            new_token = cur + 1
        return _respond(
            {"report_id": report_id, "flagged_false": flagged, "token": new_token},
            new_token,
        )

    @app.get("/scenarios/{sid}/graph")
    def get_graph(
        sid: str,
        type: str | None = None,
        threshold: float = 0.0,
        token: int | None = None,
    ):
        cur, scenario, _ = store.get(sid, token)
        graph = build_graph(
            scenario, type_assumption=type, params=_params_for(scenario)
        )
        return _respond(graph_to_dict(graph, threshold=threshold), cur)

    @app.get("/scenarios/{sid}/analysis/paths")
    def get_paths(
        sid: str,
        n_subs: int | None = None,
        top_n: int | None = None,
        type: str | None = None,
        beam: bool = False,
        token: int | None = None,
    ):
        cur, scenario, _ = store.get(sid, token)
        params = _params_for(scenario)
        graph = build_graph(scenario, type_assumption=type, params=params)
        ranking = ranked_paths(
            scenario, graph, n_subs=n_subs, top_n=top_n,
            params=params, allow_beam=beam,
        )
        return _respond(ranking_to_dict(ranking), cur)

    @app.get("/scenarios/{sid}/analysis/counts")
    def get_counts(
        sid: str, type: str | None = None, token: int | None = None
    ):
        cur, scenario, _ = store.get(sid, token)
        params = _params_for(scenario)
        graph = build_graph(scenario, type_assumption=type, params=params)
        result = count_intervals(scenario, graph, params=params)
        return _respond(counts_to_dict(result), cur)

    @app.get("/scenarios/{sid}/analysis/region")
    def get_region(
        sid: str, rect: str, window: str | None = None, token: int | None = None
    ):
        cur, scenario, _ = store.get(sid, token)
        iv = evidence_region(
            scenario, _parse_rect(rect), _parse_window(window)
        )
        return _respond({"interval": [iv.support, iv.plausibility]}, cur)

    @app.get("/scenarios/{sid}/analysis/incident-start")
    def get_incident_start(
        sid: str,
        threshold: float,
        rect: str | None = None,
        token: int | None = None,
    ):
        cur, scenario, _ = store.get(sid, token)
        area = _parse_rect(rect) if rect is not None else scenario.navmap.bounds
        t = incident_start(scenario, area, threshold)
        return _respond({"time": t}, cur)

    @app.get("/scenarios/{sid}/evidence-map")
    def get_evidence_map(
        sid: str,
        t: int | None = None,
        cell: float | None = None,
        type: str | None = None,
        token: int | None = None,
    ):
        cur, scenario, _ = store.get(sid, token)
        overrides = {} if cell is None else {"cell_size_m": cell}
        params = _params_for(scenario, **overrides)
        sub = resolve_type(scenario, type)
        active = [r for r in scenario.reports if not r.flagged_false]
        grid = init_grid(scenario.navmap, sub, params)
        grid.history = active
        if t is None:
            if not active:
                raise SchemaError("t", "scenario has no reports; pass ?t=")
            t = max(r.time for r in active)
        snap = snapshot(grid, t, scenario.sensors)
        return _respond(field_to_dict(snap), cur)

    @app.get("/scenarios/{sid}/shortest-path")
    def get_shortest_path(
        sid: str,
        to: str,
        frm: str = Query(alias="from"),
        type: str | None = None,
        token: int | None = None,
    ):
        cur, scenario, _ = store.get(sid, token)
        sub = resolve_type(scenario, type)
        path = shortest_path(
            scenario.navmap,
            _parse_point(frm, "from"),
            _parse_point(to, "to"),
            sub.draught_m,
        )
        return _respond(
            {
                "waypoints": [[p[0], p[1]] for p in path.waypoints],
                "length_m": path.length_m,
            },
            cur,
        )

    return app


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
        t0, t1 = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise SchemaError("window", "expected integer milliseconds") from exc
    if t1 < t0:
        raise SchemaError("window", "end precedes start")
    return t0, t1


def serve(config: ServiceConfig) -> None:
    import uvicorn

    logging.basicConfig(level=config.log_level.upper())
    uvicorn.run(
        create_app(config),
        host=config.host,
        port=config.port,
        log_level=config.log_level,
    )
