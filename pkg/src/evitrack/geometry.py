"""Navigational geometry: obstacle maps, visibility graphs, shortest paths.

Coordinates are local meters, x east and y north. Water is closed and
obstacle interiors are open: a point on an obstacle edge is navigable,
and a route may graze a vertex or run along an edge without being
blocked. An obstacle blocks a boat only when the boat's draught exceeds
the water depth over it (min_depth_m), so islands carry min_depth_m 0
and shallows a positive tag.
"""

from __future__ import annotations

import heapq
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

Point = tuple[float, float]

_PARAM_TOL = 1e-12


class MapError(ValueError):
    """Invalid map data; the message names the offending field."""


class NavigationError(Exception):
    """Base class for routing failures."""


class BlockedEndpointError(NavigationError):
    """A route endpoint lies strictly inside an active obstacle."""

    def __init__(self, which: str, point: Point):
        super().__init__(f"{which} endpoint {point} lies inside an obstacle")
        self.which = which
        self.point = point


class NoRouteError(NavigationError):
    """No water route exists between the endpoints."""


def _orient(a: Point, b: Point, c: Point) -> float:
    """Twice the signed area of triangle abc; > 0 means c left of ab."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _dist(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def compass_bearing(a: Point, b: Point) -> float:
    """Bearing of the ray a -> b in compass degrees: 0 north, clockwise."""
    if a == b:
        return 0.0
    return math.degrees(math.atan2(b[0] - a[0], b[1] - a[1])) % 360.0


def angular_distance_deg(a: float, b: float) -> float:
    """Smallest angle between two compass bearings, in [0, 180]."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def _within_bbox(p: Point, a: Point, b: Point) -> bool:
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def point_in_polygon(p: Point, vertices: Sequence[Point]) -> int:
    """0 outside, 1 on the boundary, 2 strictly inside."""
    x, y = p
    inside = False
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        if _orient(a, b, p) == 0.0 and _within_bbox(p, a, b):
            return 1
        if (a[1] > y) != (b[1] > y):
            t = (y - a[1]) / (b[1] - a[1])
            if x < a[0] + t * (b[0] - a[0]):
                inside = not inside
    return 2 if inside else 0


def _param_on_segment(p: Point, a: Point, b: Point) -> float:
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    if abs(dx) >= abs(dy):
        return (p[0] - a[0]) / dx
    return (p[1] - a[1]) / dy


def segment_crosses_interior(a: Point, b: Point, vertices: Sequence[Point]) -> bool:
    """True when the open segment ab meets the polygon's strict interior.

    Boundary contact alone (grazing a vertex, running along an edge)
    does not count. The test collects the parameters where ab meets the
    polygon boundary and probes the midpoint of every induced
    sub-interval with a strict point-in-polygon test.
    """
    if a == b:
        return point_in_polygon(a, vertices) == 2
    params = [0.0, 1.0]
    n = len(vertices)
    for i in range(n):
        u = vertices[i]
        v = vertices[(i + 1) % n]
        d1 = _orient(u, v, a)
        d2 = _orient(u, v, b)
        d3 = _orient(a, b, u)
        d4 = _orient(a, b, v)
        if (d1 > 0) != (d2 > 0) and d1 != 0 and d2 != 0 and (d3 > 0) != (d4 > 0) and d3 != 0 and d4 != 0:
            params.append(d1 / (d1 - d2))
            continue
        if d3 == 0.0 and _within_bbox(u, a, b):
            params.append(_param_on_segment(u, a, b))
        if d4 == 0.0 and _within_bbox(v, a, b):
            params.append(_param_on_segment(v, a, b))
    params.sort()
    prev = None
    for t in params:
        if prev is not None and t - prev > _PARAM_TOL:
            mx = a[0] + (b[0] - a[0]) * (prev + t) / 2.0
            my = a[1] + (b[1] - a[1]) * (prev + t) / 2.0
            if point_in_polygon((mx, my), vertices) == 2:
                return True
        prev = t
    return False


def _segments_touch(a: Point, b: Point, u: Point, v: Point) -> bool:
    """True when closed segments ab and uv share at least one point."""
    d1 = _orient(u, v, a)
    d2 = _orient(u, v, b)
    d3 = _orient(a, b, u)
    d4 = _orient(a, b, v)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True
    if d1 == 0.0 and _within_bbox(a, u, v):
        return True
    if d2 == 0.0 and _within_bbox(b, u, v):
        return True
    if d3 == 0.0 and _within_bbox(u, a, b):
        return True
    if d4 == 0.0 and _within_bbox(v, a, b):
        return True
    return False


def _centroid(vertices: Sequence[Point]) -> Point:
    n = len(vertices)
    return (
        math.fsum(v[0] for v in vertices) / n,
        math.fsum(v[1] for v in vertices) / n,
    )


def signed_area(vertices: Sequence[Point]) -> float:
    total = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total / 2.0


def _validate_simple_polygon(vertices: Sequence[Point], where: str) -> None:
    n = len(vertices)
    if n < 3:
        raise MapError(f"{where}: polygon needs at least 3 vertices")
    for i in range(n):
        if vertices[i] == vertices[(i + 1) % n]:
            raise MapError(f"{where}: zero-length edge at vertex {i}")
    if signed_area(vertices) == 0.0:
        raise MapError(f"{where}: polygon has zero area")
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        # spikes: consecutive edges folding back over each other
        c = vertices[(i + 2) % n]
        if _orient(a, b, c) == 0.0:
            dot = (a[0] - b[0]) * (c[0] - b[0]) + (a[1] - b[1]) * (c[1] - b[1])
            if dot > 0.0:
                raise MapError(f"{where}: spike at vertex {(i + 1) % n}")
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            u, v = vertices[j], vertices[(j + 1) % n]
            if _segments_touch(a, b, u, v):
                raise MapError(
                    f"{where}: polygon is not simple (edges {i} and {j} touch)"
                )


@dataclass(frozen=True)
class Obstacle:
    """Simple CCW polygon tagged with the depth of water over it."""

    vertices: tuple[Point, ...]
    min_depth_m: float

    def blocks(self, draught_m: float) -> bool:
        return draught_m > self.min_depth_m


@dataclass(frozen=True)
class GeoPath:
    """Polyline route through water; length is the fsum of leg lengths."""

    waypoints: tuple[Point, ...]
    length_m: float = field(default=0.0)

    def __post_init__(self):
        if not self.waypoints:
            raise MapError("path needs at least one waypoint")
        legs = [
            _dist(self.waypoints[i], self.waypoints[i + 1])
            for i in range(len(self.waypoints) - 1)
        ]
        object.__setattr__(self, "length_m", math.fsum(legs))


@dataclass(frozen=True)
class VisibilityGraph:
    points: tuple[Point, ...]
    neighbors: tuple[tuple[tuple[int, float], ...], ...]

    @property
    def edge_count(self) -> int:
        return sum(len(ns) for ns in self.neighbors) // 2


class NavMap:
    """Rectangular water area with polygonal obstacles.

    Immutable by convention; visibility graphs are cached per draught
    behind a lock so concurrent readers share one build.
    """

    def __init__(
        self,
        bounds: tuple[float, float, float, float],
        obstacles: Iterable[Obstacle] = (),
    ):
        x0, y0, x1, y1 = bounds
        if not (x0 < x1 and y0 < y1):
            raise MapError(f"bounds {bounds} are not a positive rectangle")
        self.bounds = (float(x0), float(y0), float(x1), float(y1))
        self.obstacles = tuple(obstacles)
        for idx, ob in enumerate(self.obstacles):
            where = f"obstacles[{idx}]"
            if ob.min_depth_m < 0:
                raise MapError(f"{where}.min_depth_m must be >= 0")
            if signed_area(ob.vertices) < 0:
                raise MapError(f"{where}: vertices must wind counterclockwise")
            _validate_simple_polygon(ob.vertices, where)
            for v in ob.vertices:
                if not self.in_bounds(v):
                    raise MapError(f"{where}: vertex {v} outside bounds")
        self._check_no_overlap()
        self._vis_cache: dict[float, VisibilityGraph] = {}
        self._lock = threading.Lock()

    def _check_no_overlap(self) -> None:
        obs = self.obstacles
        for i in range(len(obs)):
            for j in range(i + 1, len(obs)):
                a, b = obs[i].vertices, obs[j].vertices
                for v in a:
                    if point_in_polygon(v, b) == 2:
                        raise MapError(f"obstacles[{i}] overlaps obstacles[{j}]")
                for v in b:
                    if point_in_polygon(v, a) == 2:
                        raise MapError(f"obstacles[{i}] overlaps obstacles[{j}]")
                for k in range(len(a)):
                    u, v = a[k], a[(k + 1) % len(a)]
                    if segment_crosses_interior(u, v, b):
                        raise MapError(f"obstacles[{i}] overlaps obstacles[{j}]")
                ca = _centroid(a)
                cb = _centroid(b)
                if point_in_polygon(ca, b) == 2 or point_in_polygon(cb, a) == 2:
                    raise MapError(f"obstacles[{i}] overlaps obstacles[{j}]")

    def in_bounds(self, p: Point) -> bool:
        x0, y0, x1, y1 = self.bounds
        return x0 <= p[0] <= x1 and y0 <= p[1] <= y1

    def active_obstacles(self, draught_m: float) -> tuple[Obstacle, ...]:
        return tuple(ob for ob in self.obstacles if ob.blocks(draught_m))

    def is_navigable(self, p: Point, draught_m: float) -> bool:
        """In bounds and not strictly inside any active obstacle."""
        if not self.in_bounds(p):
            return False
        return all(
            point_in_polygon(p, ob.vertices) != 2
            for ob in self.active_obstacles(draught_m)
        )

    def segment_blocked(self, a: Point, b: Point, draught_m: float) -> bool:
        return any(
            segment_crosses_interior(a, b, ob.vertices)
            for ob in self.active_obstacles(draught_m)
        )

    def visibility_graph(self, draught_m: float) -> VisibilityGraph:
        key = float(draught_m)
        with self._lock:
            cached = self._vis_cache.get(key)
        if cached is not None:
            return cached
        built = build_visibility_graph(self, draught_m)
        with self._lock:
            self._vis_cache.setdefault(key, built)
            return self._vis_cache[key]


def build_visibility_graph(navmap: NavMap, draught_m: float) -> VisibilityGraph:
    """Graph over active-obstacle vertices; an edge joins two vertices
    whose open segment avoids every active obstacle interior."""
    active = navmap.active_obstacles(draught_m)
    index: dict[Point, int] = {}
    points: list[Point] = []
    for ob in active:
        for v in ob.vertices:
            if v not in index:
                index[v] = len(points)
                points.append(v)
    adjacency: list[list[tuple[int, float]]] = [[] for _ in points]
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if navmap.segment_blocked(points[i], points[j], draught_m):
                continue
            d = _dist(points[i], points[j])
            adjacency[i].append((j, d))
            adjacency[j].append((i, d))
    return VisibilityGraph(
        points=tuple(points),
        neighbors=tuple(tuple(sorted(ns)) for ns in adjacency),
    )


def shortest_path(
    navmap: NavMap, frm: Point, to: Point, draught_m: float
) -> GeoPath:
    """Shortest water route for the given draught.

    Raises BlockedEndpointError when an endpoint sits strictly inside an
    active obstacle (or outside the map), NoRouteError when the water is
    disconnected between the endpoints.
    """
    frm = (float(frm[0]), float(frm[1]))
    to = (float(to[0]), float(to[1]))
    if not navmap.is_navigable(frm, draught_m):
        raise BlockedEndpointError("from", frm)
    if not navmap.is_navigable(to, draught_m):
        raise BlockedEndpointError("to", to)
    if frm == to:
        return GeoPath(waypoints=(frm,))
    if not navmap.segment_blocked(frm, to, draught_m):
        return GeoPath(waypoints=(frm, to))
    vg = navmap.visibility_graph(draught_m)
    points = list(vg.points) + [frm, to]
    s = len(points) - 2
    t = len(points) - 1
    adjacency: list[list[tuple[int, float]]] = [list(ns) for ns in vg.neighbors]
    adjacency.append([])
    adjacency.append([])
    for endpoint, eidx in ((frm, s), (to, t)):
        for i, p in enumerate(vg.points):
            if not navmap.segment_blocked(endpoint, p, draught_m):
                d = _dist(endpoint, p)
                adjacency[eidx].append((i, d))
                adjacency[i].append((eidx, d))
    node_path = _astar_route(points, adjacency, s, t)
    if node_path is None:
        raise NoRouteError(f"no route from {frm} to {to} at draught {draught_m}")
    return GeoPath(waypoints=tuple(points[i] for i in node_path))


def _astar_route(
    points: Sequence[Point],
    adjacency: Sequence[Sequence[tuple[int, float]]],
    start: int,
    goal: int,
) -> list[int] | None:
    target = points[goal]
    best_g: dict[int, float] = {start: 0.0}
    parent: dict[int, int] = {}
    counter = 0
    heap = [(_dist(points[start], target), 0, 0.0, start)]
    closed: set[int] = set()
    while heap:
        _, _, g, node = heapq.heappop(heap)
        if node in closed:
            continue
        if node == goal:
            path = [node]
            while node in parent:
                node = parent[node]
                path.append(node)
            path.reverse()
            return path
        closed.add(node)
        for nxt, w in adjacency[node]:
            if nxt in closed:
                continue
            ng = g + w
            if ng >= best_g.get(nxt, math.inf):
                continue
            best_g[nxt] = ng
            parent[nxt] = node
            counter += 1
            heapq.heappush(
                heap, (ng + _dist(points[nxt], target), counter, ng, nxt)
            )
    return None


def required_speed(
    navmap: NavMap,
    p_i: Point,
    p_j: Point,
    t_i_ms: int,
    t_j_ms: int,
    draught_m: float,
) -> tuple[float, GeoPath | None]:
    """Minimum sustained speed (m/s) to cover the shortest route between
    two timed positions; (inf, None) when no route exists."""
    if t_j_ms <= t_i_ms:
        raise ValueError(f"t_j {t_j_ms} must be after t_i {t_i_ms}")
    try:
        path = shortest_path(navmap, p_i, p_j, draught_m)
    except NoRouteError:
        return math.inf, None
    dt_s = (t_j_ms - t_i_ms) / 1000.0
    return path.length_m / dt_s, path


# ---------------------------------------------------------------------------
# GeoJSON input and output


def load_navmap(source: str | Path | Mapping) -> NavMap:
    """Build a NavMap from GeoJSON with local-meter coordinates.

    Expects a FeatureCollection of Polygon features carrying a
    min_depth_m property, plus foreign members "bounds" ([x0, y0, x1,
    y1]) and "projection" ("local-meters").
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = dict(source)
    if doc.get("type") != "FeatureCollection":
        raise MapError("type: expected FeatureCollection")
    projection = doc.get("projection")
    if projection != "local-meters":
        raise MapError(f"projection: expected 'local-meters', got {projection!r}")
    bounds = doc.get("bounds")
    if (
        not isinstance(bounds, (list, tuple))
        or len(bounds) != 4
        or not all(isinstance(v, (int, float)) for v in bounds)
    ):
        raise MapError("bounds: expected [x0, y0, x1, y1]")
    obstacles = []
    for idx, feat in enumerate(doc.get("features", [])):
        where = f"features[{idx}]"
        if feat.get("type") != "Feature":
            raise MapError(f"{where}.type: expected Feature")
        geom = feat.get("geometry") or {}
        if geom.get("type") != "Polygon":
            raise MapError(f"{where}.geometry.type: expected Polygon")
        rings = geom.get("coordinates")
        if not isinstance(rings, list) or not rings:
            raise MapError(f"{where}.geometry.coordinates: expected one ring")
        if len(rings) > 1:
            raise MapError(f"{where}.geometry.coordinates: holes are not supported")
        ring = rings[0]
        if not isinstance(ring, list) or len(ring) < 4:
            raise MapError(f"{where}.geometry.coordinates[0]: ring too short")
        pts = [tuple(float(c) for c in pt) for pt in ring]
        if pts[0] == pts[-1]:
            pts = pts[:-1]
        if signed_area(pts) < 0:
            pts = list(reversed(pts))
        props = feat.get("properties") or {}
        depth = props.get("min_depth_m")
        if not isinstance(depth, (int, float)) or depth < 0:
            raise MapError(f"{where}.properties.min_depth_m: expected number >= 0")
        obstacles.append(Obstacle(vertices=tuple(pts), min_depth_m=float(depth)))
    return NavMap(bounds=tuple(float(v) for v in bounds), obstacles=obstacles)


def navmap_to_geojson(navmap: NavMap) -> dict:
    features = []
    for ob in navmap.obstacles:
        ring = [list(v) for v in ob.vertices] + [list(ob.vertices[0])]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {"min_depth_m": ob.min_depth_m},
            }
        )
    return {
        "type": "FeatureCollection",
        "projection": "local-meters",
        "bounds": list(navmap.bounds),
        "features": features,
    }
