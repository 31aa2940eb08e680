"""Regenerate the archipelago fixture and its golden outputs.

Run from the repository root after an intentional behavior change:

    python3 tests/fixtures/regen.py

The scenario is simulate(archipelago_sim.json, seed=SEED) with the two
false reports flagged, exactly what the end-to-end golden test replays.
"""
from __future__ import annotations

import json
from pathlib import Path

from evitrack.analysis import (
    count_intervals,
    counts_to_dict,
    ranked_paths,
    ranking_to_dict,
)
from evitrack.connection import build_graph, graph_to_dict
from evitrack.evidence_map import field_to_dict, init_grid, snapshot
from evitrack.params import resolve_params
from evitrack.scenario import canonical_json, scenario_to_dict, simulate

SEED = 113

HERE = Path(__file__).parent


def build_scenario():
    config = json.loads((HERE / "archipelago_sim.json").read_text("utf-8"))
    scenario = simulate(config, SEED)
    for report in scenario.reports:
        if report.source == "report-line":
            report.flagged_false = True
    return scenario


def golden_docs(scenario) -> dict[str, dict]:
    graph = build_graph(scenario)
    ranking = ranked_paths(scenario, graph)
    counts = count_intervals(scenario, graph)
    params = resolve_params(scenario.assumptions)
    sub = scenario.type_by_id(scenario.assumptions["assumed_type"])
    active = [r for r in scenario.reports if not r.flagged_false]
    grid = init_grid(scenario.navmap, sub, params)
    grid.history = active
    field = snapshot(grid, max(r.time for r in active), scenario.sensors)
    return {
        "graph": graph_to_dict(graph),
        "paths": ranking_to_dict(ranking),
        "counts": counts_to_dict(counts),
        "evmap": field_to_dict(field),
    }


def main() -> None:
    scenario = build_scenario()
    (HERE / "archipelago.json").write_text(
        canonical_json(scenario_to_dict(scenario)), "utf-8"
    )
    for name, doc in golden_docs(scenario).items():
        (HERE / "golden" / f"{name}.json").write_text(canonical_json(doc), "utf-8")
    print("fixture and goldens written under", HERE)


if __name__ == "__main__":
    main()
