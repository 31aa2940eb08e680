"""Time-evolving plausibility grid over the chart.

Each report seeds a layer of mass at its cell. As time passes the layer
spreads over reachable water at the assumed boat's top speed, dims with
age, and loses mass when it crosses the coverage of a sensor that
should have fired but stayed silent. Per cell, layers combine
orthogonally into one plausibility field; layers too old to say
anything are dropped.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import NavMap, Point, point_in_polygon
from .params import Params, resolve_params
from .scenario import Report, SchemaError, Sensor, SubmarineType

WATER = 0
SHALLOW = 1
LAND = 2

_ORTH = ((-1, 0), (1, 0), (0, -1), (0, 1))
_DIAG = ((-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass
class Layer:
    report_id: str
    birth_ms: int
    trust_p: float
    origin_cell: tuple[int, int]
    dist: np.ndarray
    att: np.ndarray

    def values(self, now_ms: int, half_life_s: float) -> np.ndarray:
        age_s = max(0, now_ms - self.birth_ms) / 1000.0
        decay = 2.0 ** (-age_s / half_life_s)
        vals = np.where(np.isfinite(self.att), self.att, 0.0)
        return vals * (self.trust_p * decay)


@dataclass
class EvidenceGrid:
    navmap: NavMap
    sub_type: SubmarineType
    params: Params
    cell_size_m: float
    origin: Point
    width: int
    height: int
    cells: np.ndarray
    layers: list[Layer] = field(default_factory=list)
    history: list[Report] = field(default_factory=list)
    t_current: int | None = None
    _coverage_cache: dict = field(default_factory=dict, repr=False)

    def cell_of(self, p: Point) -> tuple[int, int]:
        col = int((p[0] - self.origin[0]) // self.cell_size_m)
        row = int((p[1] - self.origin[1]) // self.cell_size_m)
        return row, col

    def center_of(self, row: int, col: int) -> Point:
        return (
            self.origin[0] + (col + 0.5) * self.cell_size_m,
            self.origin[1] + (row + 0.5) * self.cell_size_m,
        )

    def in_grid(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    @property
    def navigable_count(self) -> int:
        return int(np.count_nonzero(self.cells != LAND))

    @property
    def combined(self) -> np.ndarray:
        doubt = np.ones((self.height, self.width), dtype=np.float64)
        if self.t_current is not None:
            for layer in self.layers:
                doubt *= 1.0 - layer.values(
                    self.t_current, self.params.decay_half_life_s
                )
        return 1.0 - doubt

    def coverage(self, sensor: Sensor) -> np.ndarray:
        key = (sensor.id, sensor.position, sensor.range_m)
        mask = self._coverage_cache.get(key)
        if mask is None:
            xs = self.origin[0] + (np.arange(self.width) + 0.5) * self.cell_size_m
            ys = self.origin[1] + (np.arange(self.height) + 0.5) * self.cell_size_m
            dx = xs[None, :] - sensor.position[0]
            dy = ys[:, None] - sensor.position[1]
            mask = dx * dx + dy * dy <= sensor.range_m * sensor.range_m
            self._coverage_cache[key] = mask
        return mask


def init_grid(
    navmap: NavMap,
    sub_type: SubmarineType,
    params: Params | None = None,
    cell_size_m: float | None = None,
) -> EvidenceGrid:
    """Rasterize the chart at the assumed draught; a cell is blocked
    when its center is blocked."""
    params = params or resolve_params({})
    cell = cell_size_m if cell_size_m is not None else params.cell_size_m
    if cell <= 0:
        raise ValueError("cell size must be positive")
    x0, y0, x1, y1 = navmap.bounds
    width = max(1, math.ceil((x1 - x0) / cell))
    height = max(1, math.ceil((y1 - y0) / cell))
    cells = np.full((height, width), WATER, dtype=np.int8)
    active = [o for o in navmap.obstacles if o.blocks(sub_type.draught_m)]
    passive = [o for o in navmap.obstacles if not o.blocks(sub_type.draught_m)]
    for row in range(height):
        for col in range(width):
            cx = x0 + (col + 0.5) * cell
            cy = y0 + (row + 0.5) * cell
            if cx > x1 or cy > y1:
                cells[row, col] = LAND
                continue
            p = (cx, cy)
            if any(point_in_polygon(p, o.vertices) == 2 for o in active):
                cells[row, col] = LAND
            elif any(point_in_polygon(p, o.vertices) == 2 for o in passive):
                cells[row, col] = SHALLOW
    return EvidenceGrid(
        navmap=navmap,
        sub_type=sub_type,
        params=params,
        cell_size_m=cell,
        origin=(x0, y0),
        width=width,
        height=height,
        cells=cells,
    )


def _neighbors(
    cells: np.ndarray, row: int, col: int
) -> Iterable[tuple[int, int, float]]:
    """8-connected water neighbors; diagonals may not cut a blocked
    corner."""
    height, width = cells.shape
    for dr, dc in _ORTH:
        r, c = row + dr, col + dc
        if 0 <= r < height and 0 <= c < width and cells[r, c] != LAND:
            yield r, c, 1.0
    for dr, dc in _DIAG:
        r, c = row + dr, col + dc
        if not (0 <= r < height and 0 <= c < width) or cells[r, c] == LAND:
            continue
        if cells[row + dr, col] == LAND or cells[row, col + dc] == LAND:
            continue
        yield r, c, math.sqrt(2.0)


def _distance_field(
    cells: np.ndarray, start: tuple[int, int], cell_m: float
) -> np.ndarray:
    dist = np.full(cells.shape, np.inf, dtype=np.float64)
    dist[start] = 0.0
    heap: list[tuple[float, tuple[int, int]]] = [(0.0, start)]
    while heap:
        d, (row, col) = heapq.heappop(heap)
        if d > dist[row, col]:
            continue
        for r, c, w in _neighbors(cells, row, col):
            nd = d + w * cell_m
            if nd < dist[r, c]:
                dist[r, c] = nd
                heapq.heappush(heap, (nd, (r, c)))
    return dist


def add_report(grid: EvidenceGrid, report: Report) -> EvidenceGrid:
    """Seed a new layer with the report's trust at its cell, snapping
    to the nearest water cell within the configured radius."""
    if grid.t_current is not None and report.time < grid.t_current:
        raise ValueError(
            f"report {report.id!r} is older than the grid clock"
        )
    row, col = grid.cell_of(report.position)
    radius = grid.params.snap_radius_cells
    candidates: list[tuple[float, int, int]] = []
    for r in range(row - radius, row + radius + 1):
        for c in range(col - radius, col + radius + 1):
            if grid.in_grid(r, c) and grid.cells[r, c] != LAND:
                d = math.dist(grid.center_of(r, c), report.position)
                candidates.append((d, r, c))
    if not candidates:
        raise SchemaError(
            f"reports[{report.id}].position",
            f"no water cell within {radius} cells",
        )
    _, r0, c0 = min(candidates)
    dist = _distance_field(grid.cells, (r0, c0), grid.cell_size_m)
    att = np.full(grid.cells.shape, np.nan, dtype=np.float64)
    att[r0, c0] = 1.0
    grid.layers.append(
        Layer(
            report_id=report.id,
            birth_ms=report.time,
            trust_p=report.trust_p,
            origin_cell=(r0, c0),
            dist=dist,
            att=att,
        )
    )
    grid.history.append(report)
    grid.t_current = report.time if grid.t_current is None else max(
        grid.t_current, report.time
    )
    return grid


def step(
    grid: EvidenceGrid,
    dt_ms: int,
    sensors: Sequence[Sensor] = (),
    sub_type: SubmarineType | None = None,
) -> EvidenceGrid:
    """Advance the grid clock one segment, expanding every layer by
    max_speed * dt and attenuating mass that enters silent sensor
    coverage. dt may not exceed the configured step."""
    if grid.t_current is None:
        raise ValueError("grid has no reports yet")
    step_ms = int(grid.params.step_s * 1000)
    if dt_ms < 0 or dt_ms > step_ms:
        raise ValueError(f"dt must be in [0, {step_ms}] ms")
    if dt_ms == 0:
        return grid
    sub = sub_type or grid.sub_type
    t0 = grid.t_current
    t1 = t0 + dt_ms
    for layer in grid.layers:
        _expand_layer(grid, layer, sub, sensors, t0, t1)
    grid.t_current = t1
    return grid


def _expand_layer(
    grid: EvidenceGrid,
    layer: Layer,
    sub: SubmarineType,
    sensors: Sequence[Sensor],
    t0: int,
    t1: int,
) -> None:
    budget = sub.max_speed_mps * (t1 - layer.birth_ms) / 1000.0
    fresh = np.isnan(layer.att) & (layer.dist <= budget)
    if not fresh.any():
        return
    discounting = [
        s
        for s in sensors
        if s.detect_prob > 0.0
        and s.active_during(t0, t1)
        and s.silent_during(layer.birth_ms, t1)
    ]
    masks = [grid.coverage(s) for s in discounting]
    probs = [s.detect_prob for s in discounting]
    order = sorted(
        zip(*np.nonzero(fresh)), key=lambda rc: (layer.dist[rc], rc)
    )
    for row, col in order:
        best = -1.0
        for r, c, _ in _neighbors(grid.cells, row, col):
            base = layer.att[r, c]
            if not np.isfinite(base):
                continue
            factor = 1.0
            for mask, dp in zip(masks, probs):
                if mask[row, col] and not mask[r, c]:
                    factor *= 1.0 - dp
            if base * factor > best:
                best = base * factor
        if best >= 0.0:
            layer.att[row, col] = best


def age_out(
    grid: EvidenceGrid,
    eps: float | None = None,
    area_frac: float | None = None,
) -> EvidenceGrid:
    """Drop layers that no longer carry information: all-but-vanished
    mass or spread over most of the water."""
    if grid.t_current is None:
        return grid
    eps = grid.params.age_out_eps if eps is None else eps
    frac = grid.params.age_out_area_frac if area_frac is None else area_frac
    nav = max(1, grid.navigable_count)
    kept: list[Layer] = []
    for layer in grid.layers:
        vals = layer.values(grid.t_current, grid.params.decay_half_life_s)
        if float(vals.max()) < eps:
            continue
        reached = int(np.count_nonzero(np.isfinite(layer.att)))
        if reached / nav > frac:
            continue
        kept.append(layer)
    grid.layers = kept
    return grid


def advance_to(
    grid: EvidenceGrid, t_ms: int, sensors: Sequence[Sensor] = ()
) -> EvidenceGrid:
    """Step the grid to an absolute time in whole configured steps,
    aging out dead layers after each one."""
    if grid.t_current is None:
        raise ValueError("grid has no reports yet")
    step_ms = int(grid.params.step_s * 1000)
    while grid.t_current < t_ms:
        seg = min(step_ms, t_ms - grid.t_current)
        step(grid, seg, sensors)
        age_out(grid)
    return grid


def snapshot(
    grid: EvidenceGrid, t_ms: int, sensors: Sequence[Sensor] = ()
) -> EvidenceGrid:
    """Replay the grid's report history from scratch up to a time.

    Times beyond the newest report give the forward-predicted picture;
    times before the oldest are an error.
    """
    if grid.history and t_ms < min(r.time for r in grid.history):
        raise ValueError("snapshot time precedes every report")
    reports = sorted(
        (r for r in grid.history if r.time <= t_ms),
        key=lambda r: (r.time, r.id),
    )
    fresh = init_grid(
        grid.navmap, grid.sub_type, grid.params, grid.cell_size_m
    )
    fresh._coverage_cache = grid._coverage_cache
    for r in reports:
        if fresh.t_current is not None:
            advance_to(fresh, r.time, sensors)
        add_report(fresh, r)
        age_out(fresh)
    if fresh.t_current is not None:
        advance_to(fresh, t_ms, sensors)
    else:
        fresh.t_current = t_ms
    return fresh


def field_to_dict(
    grid: EvidenceGrid, levels: Sequence[float] = (0.2, 0.5, 0.8)
) -> dict:
    combined = grid.combined
    values = [round(float(v), 4) for v in combined.ravel()]
    contours = [
        {"level": lvl, "lines": _contour_lines(grid, combined, lvl)}
        for lvl in levels
    ]
    return {
        "cell_size": grid.cell_size_m,
        "origin": [grid.origin[0], grid.origin[1]],
        "width": grid.width,
        "height": grid.height,
        "values": values,
        "contours": contours,
    }


def _contour_lines(
    grid: EvidenceGrid, values: np.ndarray, level: float
) -> list[list[list[float]]]:
    """Marching squares over cell centers, stitched into polylines."""
    segs: list[tuple[tuple[float, float], tuple[float, float]]] = []

    def interp(pa: Point, va: float, pb: Point, vb: float) -> tuple[float, float]:
        t = 0.5 if vb == va else (level - va) / (vb - va)
        t = min(1.0, max(0.0, t))
        return (
            round(pa[0] + t * (pb[0] - pa[0]), 2),
            round(pa[1] + t * (pb[1] - pa[1]), 2),
        )

    for row in range(grid.height - 1):
        for col in range(grid.width - 1):
            corners = (
                (grid.center_of(row, col), float(values[row, col])),
                (grid.center_of(row, col + 1), float(values[row, col + 1])),
                (grid.center_of(row + 1, col + 1), float(values[row + 1, col + 1])),
                (grid.center_of(row + 1, col), float(values[row + 1, col])),
            )
            idx = 0
            for bit, (_, v) in enumerate(corners):
                if v >= level:
                    idx |= 1 << bit
            if idx in (0, 15):
                continue
            edges = {
                "top": interp(corners[0][0], corners[0][1], corners[1][0], corners[1][1]),
                "right": interp(corners[1][0], corners[1][1], corners[2][0], corners[2][1]),
                "bottom": interp(corners[3][0], corners[3][1], corners[2][0], corners[2][1]),
                "left": interp(corners[0][0], corners[0][1], corners[3][0], corners[3][1]),
            }
            for a, b in _MS_SEGMENTS[idx]:
                segs.append((edges[a], edges[b]))
    return _stitch(segs)


# Corner bits: 1=top-left, 2=top-right, 4=bottom-right, 8=bottom-left.
# Saddles (5, 10) split into two segments; orientation is irrelevant
# for display so the ambiguity is resolved arbitrarily but fixed.
_MS_SEGMENTS: dict[int, tuple[tuple[str, str], ...]] = {
    1: (("left", "top"),),
    2: (("top", "right"),),
    3: (("left", "right"),),
    4: (("right", "bottom"),),
    5: (("left", "top"), ("right", "bottom")),
    6: (("top", "bottom"),),
    7: (("left", "bottom"),),
    8: (("bottom", "left"),),
    9: (("bottom", "top"),),
    10: (("top", "right"), ("bottom", "left")),
    11: (("bottom", "right"),),
    12: (("right", "left"),),
    13: (("right", "top"),),
    14: (("top", "left"),),
}


def _stitch(
    segs: list[tuple[tuple[float, float], tuple[float, float]]]
) -> list[list[list[float]]]:
    by_end: dict[tuple[float, float], list[int]] = defaultdict(list)
    for i, (a, b) in enumerate(segs):
        by_end[a].append(i)
        by_end[b].append(i)
    used = [False] * len(segs)
    lines: list[list[list[float]]] = []
    for start in range(len(segs)):
        if used[start]:
            continue
        used[start] = True
        a, b = segs[start]
        line: list[tuple[float, float]] = [a, b]
        for _ in range(2):
            while True:
                tail = line[-1]
                nxt = next((i for i in by_end[tail] if not used[i]), None)
                if nxt is None:
                    break
                used[nxt] = True
                pa, pb = segs[nxt]
                line.append(pb if pa == tail else pa)
            line.reverse()
        lines.append([[p[0], p[1]] for p in line])
    return lines
