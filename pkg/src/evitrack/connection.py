"""Pairwise link evidence between sighting reports.

A link hypothesis says one boat produced both reports. Everything here
is negative evidence: each factor measures how strongly the geometry,
the silent sensors, the observed courses, or the observed types speak
AGAINST the link. Factors combine as q = 1 - prod(1 - q_f), which is
the orthogonal combination of the individual doubts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .geometry import (
    GeoPath,
    Point,
    angular_distance_deg,
    compass_bearing,
    required_speed,
)
from .params import Params, resolve_params
from .scenario import (
    Report,
    ReportFilter,
    Scenario,
    Sensor,
    SubmarineType,
    select_reports,
)


@dataclass(frozen=True)
class LinkFactors:
    speed: float
    sensors: float
    course: float
    type: float

    def combined(self) -> float:
        q = 1.0
        for f in (self.speed, self.sensors, self.course, self.type):
            q *= 1.0 - f
        return 1.0 - q


@dataclass(frozen=True)
class LinkEvidence:
    from_id: str
    to_id: str
    q: float
    factors: LinkFactors
    path: GeoPath | None
    type_id: str | None
    reason: str | None = None

    @property
    def plausibility(self) -> float:
        return 1.0 - self.q


def q_speed(v_required_mps: float, sub: SubmarineType) -> float:
    """0 at or below cruise speed, ramping linearly to 1 at max speed."""
    if v_required_mps <= sub.cruise_speed_mps:
        return 0.0
    if v_required_mps >= sub.max_speed_mps:
        return 1.0
    return (v_required_mps - sub.cruise_speed_mps) / (
        sub.max_speed_mps - sub.cruise_speed_mps
    )


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx == 0.0 and dy == 0.0:
        return math.dist(p, a)
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    return math.dist(p, (a[0] + t * dx, a[1] + t * dy))


def _path_enters_disc(path: GeoPath, center: Point, radius: float) -> bool:
    pts = path.waypoints
    if len(pts) == 1:
        return math.dist(pts[0], center) <= radius
    return any(
        _point_segment_distance(center, pts[i], pts[i + 1]) <= radius
        for i in range(len(pts) - 1)
    )


def q_sensors(sensors: Iterable[Sensor], path: GeoPath, t_i: int, t_j: int) -> float:
    """Doubt from sensors that should have seen the transit but stayed
    quiet. Each sensor counts once per link regardless of how much of
    the route runs through its disc."""
    doubt = 1.0
    for s in sensors:
        if s.detect_prob <= 0.0:
            continue
        if not s.active_during(t_i, t_j):
            continue
        if not s.silent_during(t_i, t_j):
            continue
        if not _path_enters_disc(path, s.position, s.range_m):
            continue
        doubt *= 1.0 - s.detect_prob
    return 1.0 - doubt


def q_course(r_i: Report, r_j: Report, path: GeoPath, weight: float) -> float:
    """Mismatch between observed courses and the route's bearings.

    The departure bearing is compared against the course seen at the
    first report and the arrival bearing against the course seen at the
    second; contributions average over whichever observations exist.
    A missing course observation contributes nothing (ignorance is not
    negative evidence).
    """
    pts = path.waypoints
    if len(pts) < 2:
        return 0.0
    terms = []
    if r_i.observed_course_deg is not None:
        dep = compass_bearing(pts[0], pts[1])
        terms.append(angular_distance_deg(r_i.observed_course_deg, dep) / 180.0)
    if r_j.observed_course_deg is not None:
        arr = compass_bearing(pts[-2], pts[-1])
        terms.append(angular_distance_deg(r_j.observed_course_deg, arr) / 180.0)
    if not terms:
        return 0.0
    return weight * (math.fsum(terms) / len(terms))


def q_type(r_i: Report, r_j: Report, weight: float) -> float:
    """Doubt when the two reports name different boat types; absence of
    an observation on either side contributes nothing."""
    if r_i.observed_type is None or r_j.observed_type is None:
        return 0.0
    return weight if r_i.observed_type != r_j.observed_type else 0.0


def _candidate_types(
    scenario: Scenario, type_assumption: str | None
) -> list[SubmarineType]:
    if type_assumption is not None:
        return [scenario.type_by_id(type_assumption)]
    assumed = scenario.assumptions.get("assumed_type")
    if assumed is not None:
        return [scenario.type_by_id(assumed)]
    if not scenario.types:
        raise ValueError("scenario declares no boat types")
    return list(scenario.types)


def evaluate_link(
    scenario: Scenario,
    r_i: Report,
    r_j: Report,
    type_assumption: str | None = None,
    params: Params | None = None,
) -> LinkEvidence:
    """Link evidence for the ordered pair (earlier, later).

    With no explicit type assumption and none in the scenario, every
    catalog type is tried and the most charitable one (smallest q) is
    kept: a link is only doubted as far as all readings doubt it.
    """
    if r_j.time <= r_i.time:
        raise ValueError(
            f"link requires strictly increasing times ({r_i.id} -> {r_j.id})"
        )
    params = params or resolve_params(scenario.assumptions)
    best: LinkEvidence | None = None
    for sub in _candidate_types(scenario, type_assumption):
        v_req, path = required_speed(
            scenario.navmap,
            r_i.position,
            r_j.position,
            r_i.time,
            r_j.time,
            sub.draught_m,
        )
        if path is None:
            candidate = LinkEvidence(
                from_id=r_i.id,
                to_id=r_j.id,
                q=1.0,
                factors=LinkFactors(speed=1.0, sensors=0.0, course=0.0, type=0.0),
                path=None,
                type_id=sub.id,
                reason="no-route",
            )
        else:
            factors = LinkFactors(
                speed=q_speed(v_req, sub),
                sensors=q_sensors(scenario.sensors, path, r_i.time, r_j.time),
                course=q_course(r_i, r_j, path, params.course_weight),
                type=q_type(r_i, r_j, params.type_weight),
            )
            q = factors.combined()
            candidate = LinkEvidence(
                from_id=r_i.id,
                to_id=r_j.id,
                q=q,
                factors=factors,
                path=path,
                type_id=sub.id,
                reason="too-fast" if factors.speed >= 1.0 else None,
            )
        if best is None or candidate.q < best.q:
            best = candidate
    assert best is not None
    return best


@dataclass
class ConnectionGraph:
    """Feasibility DAG over time-ordered reports.

    Edges exist only for strictly increasing times and q < 1; index
    pairs refer to positions in the reports tuple.
    """

    reports: tuple[Report, ...]
    edges: dict[tuple[int, int], LinkEvidence]
    type_id: str | None = None

    def index_of(self, report_id: str) -> int:
        for i, r in enumerate(self.reports):
            if r.id == report_id:
                return i
        raise KeyError(f"report {report_id!r} not in graph")

    def edge(self, from_id: str, to_id: str) -> LinkEvidence | None:
        try:
            return self.edges.get((self.index_of(from_id), self.index_of(to_id)))
        except KeyError:
            return None


def build_graph(
    scenario: Scenario,
    flt: ReportFilter | None = None,
    type_assumption: str | None = None,
    params: Params | None = None,
) -> ConnectionGraph:
    """Evaluate every ordered report pair; keep edges with q < 1.

    Reports flagged false by the analyst are excluded. Simultaneous
    reports are never linked.
    """
    params = params or resolve_params(scenario.assumptions)
    flt = flt or ReportFilter()
    if not flt.exclude_flagged:
        flt = ReportFilter(
            time_window=flt.time_window,
            region=flt.region,
            min_trust=flt.min_trust,
            exclude_flagged=True,
        )
    reports = tuple(select_reports(scenario, flt))
    edges: dict[tuple[int, int], LinkEvidence] = {}
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            if reports[j].time <= reports[i].time:
                continue
            ev = evaluate_link(
                scenario, reports[i], reports[j], type_assumption, params
            )
            if ev.q < 1.0:
                edges[(i, j)] = ev
    resolved = type_assumption or scenario.assumptions.get("assumed_type")
    return ConnectionGraph(reports=reports, edges=edges, type_id=resolved)


def communicating_reports(
    graph: ConnectionGraph, report_id: str, threshold: float
) -> list[tuple[str, float]]:
    """Reports linked to the given one (either direction) with
    plausibility above the threshold, most plausible first."""
    idx = graph.index_of(report_id)
    found: list[tuple[str, float]] = []
    for (i, j), ev in graph.edges.items():
        if i == idx:
            other = graph.reports[j].id
        elif j == idx:
            other = graph.reports[i].id
        else:
            continue
        if ev.plausibility > threshold:
            found.append((other, ev.plausibility))
    found.sort(key=lambda t: (-t[1], t[0]))
    return found


def graph_to_dict(graph: ConnectionGraph, threshold: float = 0.0) -> dict:
    nodes = [
        {
            "id": r.id,
            "time": r.time,
            "position": [r.position[0], r.position[1]],
            "trust_p": r.trust_p,
        }
        for r in graph.reports
    ]
    edges = []
    for (i, j), ev in sorted(graph.edges.items()):
        if ev.plausibility <= threshold and threshold > 0.0:
            continue
        edges.append(
            {
                "from": ev.from_id,
                "to": ev.to_id,
                "q": ev.q,
                "plausibility": ev.plausibility,
                "factors": {
                    "speed": ev.factors.speed,
                    "sensors": ev.factors.sensors,
                    "course": ev.factors.course,
                    "type": ev.factors.type,
                },
                "path": [[p[0], p[1]] for p in ev.path.waypoints] if ev.path else None,
            }
        )
    return {"type": graph.type_id, "nodes": nodes, "edges": edges}
