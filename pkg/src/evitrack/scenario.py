"""Scenario state: sighting reports, sensors, the boat type catalog,
JSON persistence, filtering, and the seeded simulator.

All timestamps are integer milliseconds since the scenario epoch.
Speeds are meters per second and positions local meters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .geometry import (
    MapError,
    NavMap,
    Point,
    compass_bearing,
    load_navmap,
    navmap_to_geojson,
    point_in_polygon,
)
from .params import PARAM_NAMES


class SchemaError(ValueError):
    """Input validation failure; .field names the offending field."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass
class Report:
    """One uncertain sighting: where, when, and how much it is trusted."""

    id: str
    time: int
    position: Point
    trust_p: float
    position_sigma_m: float = 500.0
    observed_type: str | None = None
    observed_course_deg: float | None = None
    observed_speed_mps: float | None = None
    source: str = ""
    flagged_false: bool = False


@dataclass
class Sensor:
    """Fixed detector disc. Empty active_intervals means always active."""

    id: str
    position: Point
    range_m: float
    detect_prob: float
    active_intervals: tuple[tuple[int, int], ...] = ()
    signals: tuple[int, ...] = ()

    def active_during(self, t0: int, t1: int) -> bool:
        if not self.active_intervals:
            return True
        return any(a <= t1 and t0 <= b for a, b in self.active_intervals)

    def silent_during(self, t0: int, t1: int) -> bool:
        return not any(t0 <= s <= t1 for s in self.signals)


@dataclass(frozen=True)
class SubmarineType:
    id: str
    name: str
    cruise_speed_mps: float
    max_speed_mps: float
    draught_m: float


@dataclass
class Scenario:
    id: str
    navmap: NavMap
    types: tuple[SubmarineType, ...]
    sensors: tuple[Sensor, ...]
    reports: list[Report]
    assumptions: dict
    map_ref: str | None = None  # original file reference, kept on save

    def type_by_id(self, type_id: str) -> SubmarineType:
        for t in self.types:
            if t.id == type_id:
                return t
        raise SchemaError("assumed_type", f"unknown type {type_id!r}")

    def report_by_id(self, report_id: str) -> Report:
        for r in self.reports:
            if r.id == report_id:
                return r
        raise SchemaError("report_id", f"unknown report {report_id!r}")


@dataclass(frozen=True)
class ReportFilter:
    """Conjunctive report selection; all bounds are inclusive."""

    time_window: tuple[int, int] | None = None
    region: tuple[float, float, float, float] | None = None
    min_trust: float | None = None
    exclude_flagged: bool = False


def resolve_type(scenario: Scenario, type_id: str | None = None) -> SubmarineType:
    """One boat type for draught- and speed-bound operations: explicit
    choice, then the scenario assumption, then a singleton catalog."""
    if type_id is not None:
        return scenario.type_by_id(type_id)
    assumed = scenario.assumptions.get("assumed_type")
    if assumed is not None:
        return scenario.type_by_id(assumed)
    if len(scenario.types) == 1:
        return scenario.types[0]
    raise SchemaError("type", "ambiguous boat type; name one explicitly")


def select_reports(scenario: Scenario, flt: ReportFilter | None = None) -> list[Report]:
    """Reports passing the filter, in stable (time, id) order."""
    flt = flt or ReportFilter()
    out = []
    for r in scenario.reports:
        if flt.exclude_flagged and r.flagged_false:
            continue
        if flt.time_window is not None:
            t0, t1 = flt.time_window
            if not t0 <= r.time <= t1:
                continue
        if flt.region is not None:
            x0, y0, x1, y1 = flt.region
            if not (x0 <= r.position[0] <= x1 and y0 <= r.position[1] <= y1):
                continue
        if flt.min_trust is not None and r.trust_p < flt.min_trust:
            continue
        out.append(r)
    out.sort(key=lambda r: (r.time, r.id))
    return out


# ---------------------------------------------------------------------------
# Validation helpers


def _need(doc: Mapping, key: str, where: str):
    if key not in doc:
        raise SchemaError(f"{where}.{key}" if where else key, "missing")
    return doc[key]


def _number(value, where: str, lo=None, hi=None) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SchemaError(where, f"expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise SchemaError(where, "must be finite")
    if lo is not None and v < lo:
        raise SchemaError(where, f"must be >= {lo}")
    if hi is not None and v > hi:
        raise SchemaError(where, f"must be <= {hi}")
    return v


def _integer(value, where: str, lo=None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(where, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise SchemaError(where, f"must be >= {lo}")
    return value


def _string(value, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise SchemaError(where, f"expected a non-empty string, got {value!r}")
    return value


def _point(value, where: str) -> Point:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(c, (int, float)) for c in value)
    ):
        raise SchemaError(where, f"expected [x, y], got {value!r}")
    return (float(value[0]), float(value[1]))


def report_from_dict(doc: Mapping, where: str = "report") -> Report:
    rid = _string(_need(doc, "id", where), f"{where}.id")
    time_ms = _integer(_need(doc, "time", where), f"{where}.time")
    pos = _point(_need(doc, "position", where), f"{where}.position")
    trust = _number(_need(doc, "trust_p", where), f"{where}.trust_p", 0.0, 1.0)
    sigma = _number(doc.get("position_sigma_m", 500.0), f"{where}.position_sigma_m")
    if sigma <= 0:
        raise SchemaError(f"{where}.position_sigma_m", "must be > 0")
    observed_type = doc.get("observed_type")
    if observed_type is not None:
        observed_type = _string(observed_type, f"{where}.observed_type")
    course = doc.get("observed_course_deg")
    if course is not None:
        course = _number(course, f"{where}.observed_course_deg", 0.0)
        if course >= 360.0:
            raise SchemaError(f"{where}.observed_course_deg", "must be < 360")
    speed = doc.get("observed_speed_mps")
    if speed is not None:
        speed = _number(speed, f"{where}.observed_speed_mps", 0.0)
    source = doc.get("source", "")
    if not isinstance(source, str):
        raise SchemaError(f"{where}.source", "expected a string")
    flagged = doc.get("flagged_false", False)
    if not isinstance(flagged, bool):
        raise SchemaError(f"{where}.flagged_false", "expected a boolean")
    return Report(
        id=rid,
        time=time_ms,
        position=pos,
        trust_p=trust,
        position_sigma_m=sigma,
        observed_type=observed_type,
        observed_course_deg=course,
        observed_speed_mps=speed,
        source=source,
        flagged_false=flagged,
    )


def _sensor_from_dict(doc: Mapping, where: str) -> Sensor:
    sid = _string(_need(doc, "id", where), f"{where}.id")
    pos = _point(_need(doc, "position", where), f"{where}.position")
    rng = _number(_need(doc, "range_m", where), f"{where}.range_m")
    if rng <= 0:
        raise SchemaError(f"{where}.range_m", "must be > 0")
    dp = _number(_need(doc, "detect_prob", where), f"{where}.detect_prob", 0.0, 1.0)
    intervals = []
    for k, iv in enumerate(doc.get("active_intervals", [])):
        ivw = f"{where}.active_intervals[{k}]"
        if not isinstance(iv, (list, tuple)) or len(iv) != 2:
            raise SchemaError(ivw, f"expected [t0, t1], got {iv!r}")
        t0 = _integer(iv[0], f"{ivw}[0]")
        t1 = _integer(iv[1], f"{ivw}[1]")
        if t1 < t0:
            raise SchemaError(ivw, "interval end before start")
        intervals.append((t0, t1))
    signals = tuple(
        sorted(
            _integer(s, f"{where}.signals[{k}]")
            for k, s in enumerate(doc.get("signals", []))
        )
    )
    return Sensor(
        id=sid,
        position=pos,
        range_m=rng,
        detect_prob=dp,
        active_intervals=tuple(intervals),
        signals=signals,
    )


def _type_from_dict(doc: Mapping, where: str) -> SubmarineType:
    tid = _string(_need(doc, "id", where), f"{where}.id")
    name = _string(_need(doc, "name", where), f"{where}.name")
    cruise = _number(
        _need(doc, "cruise_speed_mps", where), f"{where}.cruise_speed_mps"
    )
    vmax = _number(_need(doc, "max_speed_mps", where), f"{where}.max_speed_mps")
    draught = _number(_need(doc, "draught_m", where), f"{where}.draught_m")
    if cruise <= 0:
        raise SchemaError(f"{where}.cruise_speed_mps", "must be > 0")
    if vmax < cruise:
        raise SchemaError(f"{where}.max_speed_mps", "must be >= cruise speed")
    if draught <= 0:
        raise SchemaError(f"{where}.draught_m", "must be > 0")
    return SubmarineType(
        id=tid, name=name, cruise_speed_mps=cruise, max_speed_mps=vmax, draught_m=draught
    )


_ASSUMPTION_KEYS = frozenset({"assumed_type", "now"}) | PARAM_NAMES


def _assumptions_from_dict(doc: Mapping, where: str = "assumptions") -> dict:
    out = {}
    for key, value in doc.items():
        if key not in _ASSUMPTION_KEYS:
            raise SchemaError(f"{where}.{key}", "unknown assumption")
        out[key] = value
    at = out.get("assumed_type")
    if at is not None and not isinstance(at, str):
        raise SchemaError(f"{where}.assumed_type", "expected a type id string")
    now = out.get("now")
    if now is not None:
        _integer(now, f"{where}.now")
    return out


def scenario_from_dict(doc: Mapping, base_dir: str | Path | None = None) -> Scenario:
    if not isinstance(doc, Mapping):
        raise SchemaError("", "scenario must be a JSON object")
    sid = _string(doc.get("id", "scenario"), "id")
    map_value = _need(doc, "map", "")
    map_ref: str | None = None
    if isinstance(map_value, str):
        map_ref = map_value
        map_path = Path(map_value)
        if not map_path.is_absolute() and base_dir is not None:
            map_path = Path(base_dir) / map_path
        try:
            navmap = load_navmap(map_path)
        except FileNotFoundError:
            raise SchemaError("map", f"map file not found: {map_value}") from None
        except MapError as exc:
            raise SchemaError("map", str(exc)) from None
    elif isinstance(map_value, Mapping):
        try:
            navmap = load_navmap(map_value)
        except MapError as exc:
            raise SchemaError("map", str(exc)) from None
    else:
        raise SchemaError("map", "expected a GeoJSON object or a file path")

    types = []
    seen = set()
    for k, td in enumerate(doc.get("types", [])):
        t = _type_from_dict(td, f"types[{k}]")
        if t.id in seen:
            raise SchemaError(f"types[{k}].id", f"duplicate type id {t.id!r}")
        seen.add(t.id)
        types.append(t)

    sensors = []
    seen = set()
    for k, sd in enumerate(doc.get("sensors", [])):
        s = _sensor_from_dict(sd, f"sensors[{k}]")
        if s.id in seen:
            raise SchemaError(f"sensors[{k}].id", f"duplicate sensor id {s.id!r}")
        seen.add(s.id)
        sensors.append(s)

    reports = []
    seen = set()
    for k, rd in enumerate(doc.get("reports", [])):
        r = report_from_dict(rd, f"reports[{k}]")
        if r.id in seen:
            raise SchemaError(f"reports[{k}].id", f"duplicate report id {r.id!r}")
        seen.add(r.id)
        if not navmap.in_bounds(r.position):
            raise SchemaError(
                f"reports[{k}].position", f"{r.position} outside map bounds"
            )
        reports.append(r)
    reports.sort(key=lambda r: (r.time, r.id))

    assumptions = _assumptions_from_dict(doc.get("assumptions", {}) or {})
    at = assumptions.get("assumed_type")
    if at is not None and all(t.id != at for t in types):
        raise SchemaError("assumptions.assumed_type", f"unknown type {at!r}")

    return Scenario(
        id=sid,
        navmap=navmap,
        types=tuple(types),
        sensors=tuple(sensors),
        reports=reports,
        assumptions=assumptions,
        map_ref=map_ref,
    )


def report_to_dict(r: Report) -> dict:
    doc = {
        "id": r.id,
        "time": r.time,
        "position": [r.position[0], r.position[1]],
        "trust_p": r.trust_p,
        "position_sigma_m": r.position_sigma_m,
        "source": r.source,
        "flagged_false": r.flagged_false,
    }
    if r.observed_type is not None:
        doc["observed_type"] = r.observed_type
    if r.observed_course_deg is not None:
        doc["observed_course_deg"] = r.observed_course_deg
    if r.observed_speed_mps is not None:
        doc["observed_speed_mps"] = r.observed_speed_mps
    return doc


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "id": s.id,
        "map": s.map_ref if s.map_ref is not None else navmap_to_geojson(s.navmap),
        "types": [
            {
                "id": t.id,
                "name": t.name,
                "cruise_speed_mps": t.cruise_speed_mps,
                "max_speed_mps": t.max_speed_mps,
                "draught_m": t.draught_m,
            }
            for t in s.types
        ],
        "sensors": [
            {
                "id": sn.id,
                "position": [sn.position[0], sn.position[1]],
                "range_m": sn.range_m,
                "detect_prob": sn.detect_prob,
                "active_intervals": [list(iv) for iv in sn.active_intervals],
                "signals": list(sn.signals),
            }
            for sn in s.sensors
        ],
        "reports": [report_to_dict(r) for r in s.reports],
        "assumptions": dict(sorted(s.assumptions.items())),
    }


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return scenario_from_dict(doc, base_dir=path.parent)


def save_scenario(s: Scenario, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(scenario_to_dict(s)))


def ingest_report(scenario: Scenario, doc: Mapping | Report) -> Report:
    """Validate and insert one report, keeping (time, id) order."""
    r = doc if isinstance(doc, Report) else report_from_dict(doc)
    if any(existing.id == r.id for existing in scenario.reports):
        raise SchemaError("report.id", f"duplicate report id {r.id!r}")
    if not scenario.navmap.in_bounds(r.position):
        raise SchemaError("report.position", f"{r.position} outside map bounds")
    scenario.reports.append(r)
    scenario.reports.sort(key=lambda x: (x.time, x.id))
    return r


def ingest_ndjson(scenario: Scenario, text: str) -> list[Report]:
    """Ingest newline-delimited JSON reports; all-or-nothing."""
    docs = []
    for lineno, line in enumerate(text.splitlines()):
        line = line.strip()
        if not line:
            continue
        try:
            docs.append((lineno, json.loads(line)))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line[{lineno}]", f"invalid JSON: {exc}") from None
    parsed = [report_from_dict(d, f"line[{n}]") for n, d in docs]
    ids = [r.id for r in parsed]
    if len(set(ids)) != len(ids):
        raise SchemaError("line[].id", "duplicate report ids in stream")
    inserted = []
    for r in parsed:
        inserted.append(ingest_report(scenario, r))
    return inserted


def set_flag(scenario: Scenario, report_id: str, flagged: bool) -> Report:
    r = scenario.report_by_id(report_id)
    r.flagged_false = flagged
    return r


# ---------------------------------------------------------------------------
# Seeded simulator


class _Track:
    """Constant-speed polyline track with a time parametrization."""

    def __init__(self, waypoints: Sequence[Point], speed_mps: float, start_ms: int):
        self.waypoints = [tuple(map(float, w)) for w in waypoints]
        self.speed = speed_mps
        self.start_ms = start_ms
        self.knot_ms = [float(start_ms)]
        for i in range(len(self.waypoints) - 1):
            leg = math.dist(self.waypoints[i], self.waypoints[i + 1])
            self.knot_ms.append(self.knot_ms[-1] + 1000.0 * leg / speed_mps)
        self.end_ms = self.knot_ms[-1]

    def position(self, t_ms: float) -> Point:
        t = min(max(t_ms, self.knot_ms[0]), self.end_ms)
        for i in range(len(self.knot_ms) - 1):
            if t <= self.knot_ms[i + 1]:
                t0, t1 = self.knot_ms[i], self.knot_ms[i + 1]
                f = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
                a, b = self.waypoints[i], self.waypoints[i + 1]
                return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
        return self.waypoints[-1]

    def bearing(self, t_ms: float) -> float:
        t = min(max(t_ms, self.knot_ms[0]), self.end_ms)
        for i in range(len(self.knot_ms) - 1):
            if t <= self.knot_ms[i + 1] and self.knot_ms[i + 1] > self.knot_ms[i]:
                return compass_bearing(self.waypoints[i], self.waypoints[i + 1])
        return compass_bearing(self.waypoints[-2], self.waypoints[-1])


def _disc_entries(track: _Track, center: Point, radius: float) -> list[float]:
    """Times (ms) when the track crosses into the sensor disc."""
    entries: list[float] = []
    inside = math.dist(track.waypoints[0], center) <= radius
    if inside:
        entries.append(track.knot_ms[0])
    for i in range(len(track.waypoints) - 1):
        a = track.waypoints[i]
        b = track.waypoints[i + 1]
        t0, t1 = track.knot_ms[i], track.knot_ms[i + 1]
        dx, dy = b[0] - a[0], b[1] - a[1]
        qa = dx * dx + dy * dy
        if qa == 0.0:
            continue
        fx, fy = a[0] - center[0], a[1] - center[1]
        qb = 2.0 * (fx * dx + fy * dy)
        qc = fx * fx + fy * fy - radius * radius
        disc = qb * qb - 4.0 * qa * qc
        if disc <= 0.0:
            continue
        root = math.sqrt(disc)
        for s in ((-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)):
            if 0.0 < s <= 1.0:
                now_inside = not inside
                if now_inside:
                    entries.append(t0 + s * (t1 - t0))
                inside = now_inside
    return entries


def _nav_for_false_reports(navmap: NavMap, p: Point) -> bool:
    # spurious sightings can come from anywhere afloat, so only islands exclude
    if not navmap.in_bounds(p):
        return False
    return all(
        point_in_polygon(p, ob.vertices) != 2
        for ob in navmap.obstacles
        if ob.min_depth_m == 0.0
    )


def _sample_trust(rng: np.random.Generator, spec, where: str) -> float:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return _number(spec, where, 0.0, 1.0)
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        lo = _number(spec[0], f"{where}[0]", 0.0, 1.0)
        hi = _number(spec[1], f"{where}[1]", 0.0, 1.0)
        if hi < lo:
            raise SchemaError(where, "trust range reversed")
        return float(rng.uniform(lo, hi))
    raise SchemaError(where, f"expected a value or [lo, hi], got {spec!r}")


def simulate(config: Mapping, seed: int, base_dir: str | Path | None = None) -> Scenario:
    """Generate a scenario from ground-truth tracks, deterministically.

    The same (config, seed) pair always yields byte-identical scenario
    JSON: one numpy Generator drives every draw in a fixed order.
    """
    rng = np.random.default_rng(seed)
    skeleton = {
        "id": config.get("id", f"sim-{seed}"),
        "map": _need(config, "map", ""),
        "types": config.get("types", []),
        "sensors": config.get("sensors", []),
        "reports": [],
        "assumptions": config.get("assumptions", {}),
    }
    scenario = scenario_from_dict(skeleton, base_dir=base_dir)
    duration_ms = _integer(_need(config, "duration_ms", ""), "duration_ms", 1)
    navmap = scenario.navmap

    reports: list[Report] = []
    tracks: list[tuple[_Track, SubmarineType]] = []
    for k, tdoc in enumerate(config.get("tracks", [])):
        where = f"tracks[{k}]"
        sub = scenario.type_by_id(_string(_need(tdoc, "type", where), f"{where}.type"))
        speed = _number(_need(tdoc, "speed_mps", where), f"{where}.speed_mps")
        if speed <= 0:
            raise SchemaError(f"{where}.speed_mps", "must be > 0")
        start_ms = _integer(tdoc.get("start_ms", 0), f"{where}.start_ms", 0)
        wpts = [
            _point(w, f"{where}.waypoints[{i}]")
            for i, w in enumerate(_need(tdoc, "waypoints", where))
        ]
        if len(wpts) < 2:
            raise SchemaError(f"{where}.waypoints", "need at least 2 waypoints")
        for i in range(len(wpts) - 1):
            if navmap.segment_blocked(wpts[i], wpts[i + 1], sub.draught_m):
                raise SchemaError(
                    f"{where}.waypoints", f"leg {i} crosses land for {sub.id}"
                )
            if not navmap.is_navigable(wpts[i], sub.draught_m):
                raise SchemaError(f"{where}.waypoints[{i}]", "not navigable")
        if not navmap.is_navigable(wpts[-1], sub.draught_m):
            raise SchemaError(f"{where}.waypoints[{len(wpts) - 1}]", "not navigable")
        track = _Track(wpts, speed, start_ms)
        tracks.append((track, sub))

        every = _integer(
            _need(tdoc, "report_every_ms", where), f"{where}.report_every_ms", 1
        )
        prefix = tdoc.get("id_prefix", f"t{k}")
        sigma = _number(tdoc.get("position_sigma_m", 500.0), f"{where}.position_sigma_m")
        course_noise = _number(
            tdoc.get("course_noise_deg", 10.0), f"{where}.course_noise_deg", 0.0
        )
        observe_type_prob = _number(
            tdoc.get("observe_type_prob", 0.0), f"{where}.observe_type_prob", 0.0, 1.0
        )
        seq = 1
        t = float(start_ms)
        while t <= min(track.end_ms, float(duration_ms)):
            true_pos = track.position(t)
            pos = (round(float(true_pos[0]), 1), round(float(true_pos[1]), 1))
            for _ in range(20):
                off = rng.normal(0.0, sigma, 2)
                if math.hypot(off[0], off[1]) > 3.0 * sigma:
                    continue
                cand = (
                    round(float(true_pos[0] + off[0]), 1),
                    round(float(true_pos[1] + off[1]), 1),
                )
                if navmap.is_navigable(cand, sub.draught_m):
                    pos = cand
                    break
            trust = _sample_trust(
                rng, tdoc.get("trust", [0.4, 0.9]), f"{where}.trust"
            )
            course = float(track.bearing(t) + rng.normal(0.0, course_noise)) % 360.0
            observed_type = sub.id if rng.uniform() < observe_type_prob else None
            reports.append(
                Report(
                    id=f"{prefix}{seq:02d}",
                    time=int(t),
                    position=pos,
                    trust_p=round(float(trust), 4),
                    position_sigma_m=sigma,
                    observed_type=observed_type,
                    observed_course_deg=round(float(course), 1),
                    source=tdoc.get("source", "lookout"),
                )
            )
            seq += 1
            t += every

    # sensor firings from ground truth, one Bernoulli draw per disc entry
    sensors = []
    for sensor in scenario.sensors:
        times: list[int] = list(sensor.signals)
        for track, _sub in tracks:
            for te in _disc_entries(track, sensor.position, sensor.range_m):
                if te > duration_ms:
                    continue
                if not sensor.active_during(int(te), int(te)):
                    continue
                if rng.uniform() < sensor.detect_prob:
                    times.append(int(te))
        sensors.append(replace(sensor, signals=tuple(sorted(set(times)))))

    false_cfg = config.get("false_reports")
    if false_cfg:
        rate = _number(
            _need(false_cfg, "rate_per_hour", "false_reports"),
            "false_reports.rate_per_hour",
            0.0,
        )
        sigma = _number(
            false_cfg.get("position_sigma_m", 800.0), "false_reports.position_sigma_m"
        )
        count = int(rng.poisson(rate * duration_ms / 3_600_000.0))
        x0, y0, x1, y1 = navmap.bounds
        for k in range(count):
            t = int(rng.uniform(0, duration_ms))
            pos = None
            for _ in range(100):
                cand = (
                    round(float(rng.uniform(x0, x1)), 1),
                    round(float(rng.uniform(y0, y1)), 1),
                )
                if _nav_for_false_reports(navmap, cand):
                    pos = cand
                    break
            if pos is None:
                continue
            trust = _sample_trust(
                rng, false_cfg.get("trust", [0.2, 0.7]), "false_reports.trust"
            )
            reports.append(
                Report(
                    id=f"f{k + 1:02d}",
                    time=t,
                    position=pos,
                    trust_p=round(float(trust), 4),
                    position_sigma_m=sigma,
                    source="report-line",
                )
            )

    reports.sort(key=lambda r: (r.time, r.id))
    scenario.reports = reports
    scenario.sensors = tuple(sensors)
    return scenario
