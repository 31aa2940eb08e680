// Pure mappings from service documents to render-ready models. No
// analysis happens here: every number is copied from a response field,
// at most compared against a view control or turned into a coordinate.

import { rampIndex, trustColor } from "./ramp.js";
import type {
  CountsDoc,
  FieldDoc,
  GraphDoc,
  GraphEdgeDoc,
  PathsDoc,
  Point,
  ReportDoc,
  ScenarioDoc,
} from "./types.js";

export interface PathsPanelRow {
  rank: number;
  chain: string[];
  label: string;
  support: number;
  plausibility: number;
  supportText: string;
  plausibilityText: string;
}

export interface PathsPanelModel {
  rows: PathsPanelRow[];
  conflictK: number;
  conflictText: string;
  nSubs: number;
  approximate: boolean;
}

export function pathsPanel(doc: PathsDoc): PathsPanelModel {
  return {
    rows: doc.paths.map((row) => ({
      rank: row.rank,
      chain: row.chain,
      label: row.chain.length ? row.chain.join(" → ") : "(no boat)",
      support: row.support,
      plausibility: row.plausibility,
      supportText: String(row.support),
      plausibilityText: String(row.plausibility),
    })),
    conflictK: doc.conflict_k,
    conflictText: String(doc.conflict_k),
    nSubs: doc.n_subs,
    approximate: doc.approximate,
  };
}

export interface CountsPanelRow {
  count: number;
  support: number;
  plausibility: number;
  supportText: string;
  plausibilityText: string;
}

export function countsPanel(doc: CountsDoc): CountsPanelRow[] {
  return Object.entries(doc.intervals)
    .map(([count, [support, plausibility]]) => ({
      count: Number(count),
      support,
      plausibility,
      supportText: String(support),
      plausibilityText: String(plausibility),
    }))
    .sort((a, b) => a.count - b.count);
}

// Edges drawn in the graph view: above the control threshold and, when a
// report is selected, incident to it. Subsetting only; the numbers pass
// through untouched.
export function graphEdges(
  doc: GraphDoc,
  selected: string | null,
  threshold: number,
): GraphEdgeDoc[] {
  return doc.edges.filter(
    (e) =>
      e.plausibility > threshold &&
      (selected === null || e.from === selected || e.to === selected),
  );
}

// Route polylines for one ranked chain, stitched from the graph's edge
// geometry (the service ships each link's navigable path).
export function chainPolylines(chain: string[], graph: GraphDoc): Point[][] {
  const lines: Point[][] = [];
  for (let i = 0; i + 1 < chain.length; i++) {
    const a = chain[i]!;
    const b = chain[i + 1]!;
    const edge = graph.edges.find(
      (e) =>
        (e.from === a && e.to === b) || (e.from === b && e.to === a),
    );
    if (edge) lines.push(edge.path);
  }
  return lines;
}

export interface HeatCell {
  x: number;
  y: number;
  size: number;
  ramp: number;
}

export function heatCells(doc: FieldDoc): HeatCell[] {
  const cells: HeatCell[] = [];
  const [ox, oy] = doc.origin;
  for (let row = 0; row < doc.height; row++) {
    for (let col = 0; col < doc.width; col++) {
      const v = doc.values[row * doc.width + col]!;
      const idx = rampIndex(v);
      if (idx < 0) continue;
      cells.push({
        x: ox + col * doc.cell_size,
        y: oy + row * doc.cell_size,
        size: doc.cell_size,
        ramp: idx,
      });
    }
  }
  return cells;
}

export interface ReportMarker {
  id: string;
  position: Point;
  color: string;
  flaggedFalse: boolean;
  selected: boolean;
}

export function reportMarkers(
  scenario: ScenarioDoc,
  selected: ReadonlySet<string>,
): ReportMarker[] {
  return scenario.reports.map((r) => ({
    id: r.id,
    position: r.position,
    color: trustColor(r.trust_p),
    flaggedFalse: r.flagged_false,
    selected: selected.has(r.id),
  }));
}

// Detail popover for a clicked report: one line per present field,
// values stringified verbatim.
export function reportDetail(report: ReportDoc): [string, string][] {
  const rows: [string, string][] = [
    ["id", report.id],
    ["time", String(report.time)],
    ["position", `${report.position[0]}, ${report.position[1]}`],
    ["trust", String(report.trust_p)],
    ["flagged false", String(report.flagged_false)],
  ];
  if (report.source !== undefined) rows.push(["source", report.source]);
  if (report.position_sigma_m !== undefined)
    rows.push(["position sigma (m)", String(report.position_sigma_m)]);
  if (report.observed_course_deg != null)
    rows.push(["observed course (deg)", String(report.observed_course_deg)]);
  if (report.observed_type != null)
    rows.push(["observed type", report.observed_type]);
  return rows;
}
