from __future__ import annotations

import pytest

from evitrack.connection import ConnectionGraph, LinkEvidence, LinkFactors
from evitrack.geometry import NavMap, Obstacle
from evitrack.scenario import Report, Scenario, Sensor, SubmarineType

MIDGET = SubmarineType(
    id="midget",
    name="Midget",
    cruise_speed_mps=2.0,
    max_speed_mps=6.0,
    draught_m=10.0,
)

PATROL = SubmarineType(
    id="patrol",
    name="Patrol",
    cruise_speed_mps=4.0,
    max_speed_mps=10.0,
    draught_m=25.0,
)


def open_sea(size: float = 20000.0) -> NavMap:
    return NavMap(bounds=(0.0, 0.0, size, size))


def island_map() -> NavMap:
    """One island and one shoal inside a 20 km square."""
    island = Obstacle(
        vertices=(
            (8000.0, 8000.0),
            (12000.0, 8000.0),
            (12000.0, 12000.0),
            (8000.0, 12000.0),
        ),
        min_depth_m=0.0,
    )
    shoal = Obstacle(
        vertices=(
            (2000.0, 14000.0),
            (6000.0, 14000.0),
            (6000.0, 18000.0),
            (2000.0, 18000.0),
        ),
        min_depth_m=15.0,
    )
    return NavMap(bounds=(0.0, 0.0, 20000.0, 20000.0), obstacles=(island, shoal))


def make_scenario(
    reports=(),
    navmap: NavMap | None = None,
    sensors=(),
    types=(MIDGET,),
    assumptions: dict | None = None,
    sid: str = "test",
) -> Scenario:
    return Scenario(
        id=sid,
        navmap=navmap if navmap is not None else open_sea(),
        types=tuple(types),
        sensors=tuple(sensors),
        reports=list(reports),
        assumptions=dict(assumptions or {}),
    )


def make_report(i: int, t: int, pos, trust: float, **kw) -> Report:
    return Report(
        id=f"r{i:02d}", time=t, position=pos, trust_p=trust, source="lookout", **kw
    )


def make_graph(ps, q_edges, type_id: str | None = None) -> ConnectionGraph:
    """Synthetic graph: report trusts and link doubts set directly, no
    geometry involved. Edges with q >= 1 are omitted, as build_graph does."""
    reports = tuple(
        Report(
            id=f"r{i + 1:02d}",
            time=i * 600_000,
            position=(1000.0 * i, 1000.0),
            trust_p=p,
            source="lookout",
        )
        for i, p in enumerate(ps)
    )
    edges = {}
    for (i, j), q in q_edges.items():
        if q >= 1.0:
            continue
        edges[(i, j)] = LinkEvidence(
            from_id=reports[i].id,
            to_id=reports[j].id,
            q=q,
            factors=LinkFactors(speed=q, sensors=0.0, course=0.0, type=0.0),
            path=None,
            type_id=type_id,
        )
    return ConnectionGraph(reports=reports, edges=edges, type_id=type_id)


def scenario_doc(
    sid: str = "s1",
    navmap: NavMap | None = None,
    reports: list | None = None,
    types=(MIDGET,),
    sensors: list | None = None,
    assumptions: dict | None = None,
) -> dict:
    """A scenario file as a plain JSON document."""
    from evitrack.geometry import navmap_to_geojson

    if reports is None:
        reports = [
            {"id": "r1", "time": 0, "position": [1000.0, 1000.0], "trust_p": 0.6},
            {"id": "r2", "time": 1_000_000, "position": [5000.0, 1000.0], "trust_p": 0.5},
        ]
    return {
        "id": sid,
        "map": navmap_to_geojson(navmap if navmap is not None else open_sea()),
        "types": [
            {
                "id": t.id,
                "name": t.name,
                "cruise_speed_mps": t.cruise_speed_mps,
                "max_speed_mps": t.max_speed_mps,
                "draught_m": t.draught_m,
            }
            for t in types
        ],
        "sensors": list(sensors or []),
        "reports": reports,
        "assumptions": dict(assumptions or {}),
    }


@pytest.fixture
def sea() -> NavMap:
    return open_sea()


@pytest.fixture
def islands() -> NavMap:
    return island_map()
