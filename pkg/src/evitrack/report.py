"""Static report rendering: situation figures plus delimited tables.

Analysis numbers come straight from the library ops; this module only
draws them. Figures are rendered headless to PNG files next to the CSV
tables so a report directory is self-contained.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle, Polygon as MplPolygon

from .analysis import count_intervals, ranked_paths
from .connection import ConnectionGraph, build_graph
from .evidence_map import field_to_dict, init_grid, snapshot
from .params import resolve_params
from .scenario import Scenario, SchemaError, resolve_type


def _draw_chart(ax, scenario: Scenario) -> None:
    x0, y0, x1, y1 = scenario.navmap.bounds
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_facecolor("#dce9f5")
    for obs in scenario.navmap.obstacles:
        deep = obs.min_depth_m > 0
        ax.add_patch(
            MplPolygon(
                obs.vertices,
                closed=True,
                facecolor="#bcd2e8" if deep else "#c8b89a",
                edgecolor="#6b7a8f",
                linewidth=0.8,
                zorder=2,
            )
        )
    for s in scenario.sensors:
        ax.add_patch(
            Circle(
                s.position,
                s.range_m,
                fill=False,
                edgecolor="#7a4ea3",
                linestyle="--",
                linewidth=0.9,
                zorder=3,
            )
        )
        ax.plot(*s.position, marker="^", color="#7a4ea3", markersize=6, zorder=4)
    ax.set_xlabel("east [m]")
    ax.set_ylabel("north [m]")


def _draw_reports(ax, scenario: Scenario) -> None:
    for r in scenario.reports:
        color = "#b0413e" if r.flagged_false else "#1f5f8b"
        ax.plot(
            r.position[0],
            r.position[1],
            marker="x" if r.flagged_false else "o",
            color=color,
            markersize=5,
            zorder=5,
        )
        ax.annotate(
            r.id,
            r.position,
            textcoords="offset points",
            xytext=(4, 4),
            fontsize=7,
            color=color,
            zorder=6,
        )


def _fig_overview(scenario: Scenario, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 8))
    _draw_chart(ax, scenario)
    _draw_reports(ax, scenario)
    ax.set_title(f"Scenario {scenario.id}: reports and sensors")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def _fig_graph(scenario: Scenario, graph: ConnectionGraph, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 8))
    _draw_chart(ax, scenario)
    _draw_reports(ax, scenario)
    for (i, j), ev in sorted(graph.edges.items()):
        a = graph.reports[i].position
        b = graph.reports[j].position
        pts = ev.path.waypoints if ev.path is not None else (a, b)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(
            xs,
            ys,
            color="#2a7f4f",
            alpha=max(0.15, ev.plausibility),
            linewidth=0.6 + 2.0 * ev.plausibility,
            zorder=4,
        )
    ax.set_title(f"Scenario {scenario.id}: feasible links (darker = more plausible)")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def _fig_evidence_map(scenario: Scenario, field: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 8))
    _draw_chart(ax, scenario)
    w, h = field["width"], field["height"]
    ox, oy = field["origin"]
    cell = field["cell_size"]
    grid = [field["values"][row * w : (row + 1) * w] for row in range(h)]
    im = ax.imshow(
        grid,
        origin="lower",
        extent=(ox, ox + w * cell, oy, oy + h * cell),
        cmap="YlOrRd",
        vmin=0.0,
        vmax=1.0,
        alpha=0.75,
        zorder=3,
    )
    for contour in field["contours"]:
        for line in contour["lines"]:
            xs = [p[0] for p in line]
            ys = [p[1] for p in line]
            ax.plot(xs, ys, color="#5c1010", linewidth=0.8, zorder=4)
    _draw_reports(ax, scenario)
    fig.colorbar(im, ax=ax, label="plausibility", shrink=0.8)
    ax.set_title(f"Scenario {scenario.id}: evidence map")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def render_report(
    scenario: Scenario,
    out_dir: str | Path,
    type_id: str | None = None,
    t_ms: int | None = None,
) -> dict:
    """Write overview/graph/evidence-map figures and paths/counts CSV
    tables; returns the file list."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = resolve_params(scenario.assumptions)
    graph = build_graph(scenario, type_assumption=type_id, params=params)
    ranking = ranked_paths(scenario, graph, params=params, allow_beam=True)

    written: list[str] = []

    def mark(name: str) -> Path:
        written.append(name)
        return out / name

    _fig_overview(scenario, mark("overview.png"))
    _fig_graph(scenario, graph, mark("graph.png"))

    active = [r for r in scenario.reports if not r.flagged_false]
    if active:
        sub = resolve_type(scenario, type_id)
        grid = init_grid(scenario.navmap, sub, params)
        grid.history = active
        t = t_ms if t_ms is not None else max(r.time for r in active)
        field = field_to_dict(snapshot(grid, t, scenario.sensors))
        _fig_evidence_map(scenario, field, mark("evidence_map.png"))

    with open(mark("paths.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "chain", "support", "plausibility"])
        for p in ranking.paths:
            writer.writerow(
                [
                    p.rank,
                    " ".join(p.chain) if p.chain else "(none)",
                    f"{p.interval.support:.6f}",
                    f"{p.interval.plausibility:.6f}",
                ]
            )

    if len(graph.reports) <= params.exact_limit:
        counts = count_intervals(scenario, graph, params=params)
        with open(mark("counts.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["count", "support", "plausibility"])
            for c, iv in sorted(counts.intervals.items()):
                writer.writerow([c, f"{iv.support:.6f}", f"{iv.plausibility:.6f}"])

    return {"out_dir": str(out), "written": sorted(written)}
