from __future__ import annotations

import math
import random

import pytest

from conftest import MIDGET, PATROL, island_map, open_sea
from evitrack.geometry import (
    BlockedEndpointError,
    MapError,
    NavMap,
    NavigationError,
    NoRouteError,
    Obstacle,
    angular_distance_deg,
    compass_bearing,
    load_navmap,
    navmap_to_geojson,
    point_in_polygon,
    required_speed,
    shortest_path,
)
from oracles import grid_shortest

SQUARE = ((0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0))


def euclid(a, b) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


# ---------------------------------------------------------------------------
# Primitives


def test_point_in_polygon_classes():
    assert point_in_polygon((5.0, 5.0), SQUARE) == 2
    assert point_in_polygon((0.0, 5.0), SQUARE) == 1
    assert point_in_polygon((10.0, 10.0), SQUARE) == 1
    assert point_in_polygon((-1.0, 5.0), SQUARE) == 0
    assert point_in_polygon((5.0, 11.0), SQUARE) == 0


def test_compass_bearing_cardinals():
    assert compass_bearing((0.0, 0.0), (0.0, 1.0)) == pytest.approx(0.0)
    assert compass_bearing((0.0, 0.0), (1.0, 0.0)) == pytest.approx(90.0)
    assert compass_bearing((0.0, 0.0), (0.0, -1.0)) == pytest.approx(180.0)
    assert compass_bearing((0.0, 0.0), (-1.0, 0.0)) == pytest.approx(270.0)
    assert compass_bearing((0.0, 0.0), (1.0, 1.0)) == pytest.approx(45.0)


def test_angular_distance_wraps():
    assert angular_distance_deg(350.0, 10.0) == pytest.approx(20.0)
    assert angular_distance_deg(10.0, 350.0) == pytest.approx(20.0)
    assert angular_distance_deg(0.0, 180.0) == pytest.approx(180.0)
    assert angular_distance_deg(90.0, 90.0) == 0.0


# ---------------------------------------------------------------------------
# Routing


def test_open_sea_is_straight():
    path = shortest_path(open_sea(), (1000.0, 1000.0), (4000.0, 5000.0), 10.0)
    assert path.waypoints == ((1000.0, 1000.0), (4000.0, 5000.0))
    assert path.length_m == pytest.approx(5000.0)


def test_island_detour_length(islands):
    # Route must round two island corners; length is the two diagonal
    # legs plus the straight run along the island side.
    frm, to = (6000.0, 10000.0), (14000.0, 10000.0)
    path = shortest_path(islands, frm, to, MIDGET.draught_m)
    want = 2.0 * math.hypot(2000.0, 2000.0) + 4000.0
    assert path.length_m == pytest.approx(want, abs=1e-6)
    assert len(path.waypoints) == 4
    assert path.length_m > euclid(frm, to)


def test_draught_decides_shoal_passage(islands):
    # The shoal keeps 15 m of water: a 10 m boat crosses it, a 25 m boat
    # must go around.
    frm, to = (1000.0, 16000.0), (7000.0, 16000.0)
    shallow_ok = shortest_path(islands, frm, to, MIDGET.draught_m)
    deep = shortest_path(islands, frm, to, PATROL.draught_m)
    assert shallow_ok.length_m == pytest.approx(euclid(frm, to))
    assert deep.length_m > shallow_ok.length_m


def test_blocked_endpoint(islands):
    with pytest.raises(BlockedEndpointError):
        shortest_path(islands, (10000.0, 10000.0), (1000.0, 1000.0), 10.0)
    with pytest.raises(BlockedEndpointError):
        shortest_path(islands, (1000.0, 1000.0), (10000.0, 10000.0), 10.0)


def test_full_width_wall_admits_edge_slide():
    # Obstacle interiors are open and boundaries navigable, so a wall
    # spanning the whole chart still leaves a route hugging its end.
    wall = Obstacle(
        ((0.0, 4000.0), (10000.0, 4000.0), (10000.0, 4500.0), (0.0, 4500.0)), 0.0
    )
    navmap = NavMap(bounds=(0.0, 0.0, 10000.0, 10000.0), obstacles=(wall,))
    path = shortest_path(navmap, (5000.0, 1000.0), (5000.0, 9000.0), 10.0)
    xs = {p[0] for p in path.waypoints[1:-1]}
    assert xs <= {0.0, 10000.0}
    assert path.length_m > 8000.0


def test_no_route_is_a_navigation_error():
    assert issubclass(NoRouteError, NavigationError)
    assert issubclass(BlockedEndpointError, NavigationError)


def test_required_speed(islands):
    frm, to = (6000.0, 10000.0), (14000.0, 10000.0)
    v, path = required_speed(islands, frm, to, 0, 3_600_000, MIDGET.draught_m)
    assert path is not None
    assert v == pytest.approx(path.length_m / 3600.0)


def test_never_below_euclidean_random(islands):
    rng = random.Random(11)
    pts = []
    while len(pts) < 30:
        p = (rng.uniform(0, 20000), rng.uniform(0, 20000))
        if all(point_in_polygon(p, o.vertices) == 0 for o in islands.obstacles):
            pts.append(p)
    for a in pts[:15]:
        for b in pts[15:]:
            d = shortest_path(islands, a, b, PATROL.draught_m).length_m
            assert d >= euclid(a, b) - 1e-9


def test_triangle_inequality_random(islands):
    rng = random.Random(12)
    pts = []
    while len(pts) < 12:
        p = (rng.uniform(0, 20000), rng.uniform(0, 20000))
        if all(point_in_polygon(p, o.vertices) == 0 for o in islands.obstacles):
            pts.append(p)
    for i in range(0, 12, 3):
        a, b, c = pts[i], pts[i + 1], pts[i + 2]
        dab = shortest_path(islands, a, b, MIDGET.draught_m).length_m
        dbc = shortest_path(islands, b, c, MIDGET.draught_m).length_m
        dac = shortest_path(islands, a, c, MIDGET.draught_m).length_m
        assert dac <= dab + dbc + 1e-9


def test_agrees_with_grid_oracle(islands):
    # The 50 m grid path cannot beat the true optimum by more than a
    # couple of cells of snapping, and overshoots by at most the
    # 8-connectivity stretch factor.
    frm, to = (6000.0, 10000.0), (14000.0, 10000.0)
    exact = shortest_path(islands, frm, to, PATROL.draught_m).length_m

    def blocked(p):
        for o in islands.obstacles:
            if o.min_depth_m < PATROL.draught_m and point_in_polygon(p, o.vertices) == 2:
                return True
        return False

    approx = grid_shortest(blocked, islands.bounds, frm, to, 50.0)
    assert approx is not None
    slack = 4 * 50.0 * math.sqrt(2.0)
    stretch = 2.0 * math.sqrt(2.0 - math.sqrt(2.0)) / math.sqrt(2.0)
    assert exact - slack <= approx <= exact * stretch + slack


# ---------------------------------------------------------------------------
# Serialization


def test_geojson_roundtrip(islands):
    doc = navmap_to_geojson(islands)
    back = load_navmap(doc)
    assert back.bounds == islands.bounds
    assert len(back.obstacles) == len(islands.obstacles)
    for a, b in zip(back.obstacles, islands.obstacles):
        assert a.vertices == b.vertices
        assert a.min_depth_m == b.min_depth_m


def test_malformed_map_rejected():
    with pytest.raises(MapError):
        load_navmap({"type": "FeatureCollection"})
    with pytest.raises(MapError):
        load_navmap({"type": "FeatureCollection", "features": [], "bounds": [0, 0, -1, 1]})
