// Canvas scene assembly and drawing. Drawing goes through the Draw2D
// interface so tests can swap the real canvas for an op recorder and
// assert determinism.

import { HEAT_RAMP } from "./ramp.js";
import type {
  ContourDoc,
  FieldDoc,
  GraphDoc,
  GraphEdgeDoc,
  Overlays,
  PathsDoc,
  Point,
  ScenarioDoc,
  SensorDoc,
} from "./types.js";
import {
  chainPolylines,
  graphEdges,
  heatCells,
  reportMarkers,
  type HeatCell,
  type ReportMarker,
} from "./viewmodel.js";

export interface Draw2D {
  save(): void;
  restore(): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  setFillStyle(style: string): void;
  setStrokeStyle(style: string): void;
  setLineWidth(width: number): void;
  setGlobalAlpha(alpha: number): void;
  setFont(font: string): void;
}

export class RecordingContext implements Draw2D {
  readonly ops: string[] = [];

  save(): void {
    this.ops.push("save");
  }
  restore(): void {
    this.ops.push("restore");
  }
  beginPath(): void {
    this.ops.push("beginPath");
  }
  moveTo(x: number, y: number): void {
    this.ops.push(`moveTo ${x} ${y}`);
  }
  lineTo(x: number, y: number): void {
    this.ops.push(`lineTo ${x} ${y}`);
  }
  closePath(): void {
    this.ops.push("closePath");
  }
  arc(x: number, y: number, r: number, a0: number, a1: number): void {
    this.ops.push(`arc ${x} ${y} ${r} ${a0} ${a1}`);
  }
  rect(x: number, y: number, w: number, h: number): void {
    this.ops.push(`rect ${x} ${y} ${w} ${h}`);
  }
  fill(): void {
    this.ops.push("fill");
  }
  stroke(): void {
    this.ops.push("stroke");
  }
  fillText(text: string, x: number, y: number): void {
    this.ops.push(`fillText ${JSON.stringify(text)} ${x} ${y}`);
  }
  setFillStyle(style: string): void {
    this.ops.push(`fillStyle ${style}`);
  }
  setStrokeStyle(style: string): void {
    this.ops.push(`strokeStyle ${style}`);
  }
  setLineWidth(width: number): void {
    this.ops.push(`lineWidth ${width}`);
  }
  setGlobalAlpha(alpha: number): void {
    this.ops.push(`globalAlpha ${alpha}`);
  }
  setFont(font: string): void {
    this.ops.push(`font ${font}`);
  }
}

export class CanvasContext implements Draw2D {
  constructor(private readonly ctx: CanvasRenderingContext2D) {}

  save(): void {
    this.ctx.save();
  }
  restore(): void {
    this.ctx.restore();
  }
  beginPath(): void {
    this.ctx.beginPath();
  }
  moveTo(x: number, y: number): void {
    this.ctx.moveTo(x, y);
  }
  lineTo(x: number, y: number): void {
    this.ctx.lineTo(x, y);
  }
  closePath(): void {
    this.ctx.closePath();
  }
  arc(x: number, y: number, r: number, a0: number, a1: number): void {
    this.ctx.arc(x, y, r, a0, a1);
  }
  rect(x: number, y: number, w: number, h: number): void {
    this.ctx.rect(x, y, w, h);
  }
  fill(): void {
    this.ctx.fill();
  }
  stroke(): void {
    this.ctx.stroke();
  }
  fillText(text: string, x: number, y: number): void {
    this.ctx.fillText(text, x, y);
  }
  setFillStyle(style: string): void {
    this.ctx.fillStyle = style;
  }
  setStrokeStyle(style: string): void {
    this.ctx.strokeStyle = style;
  }
  setLineWidth(width: number): void {
    this.ctx.lineWidth = width;
  }
  setGlobalAlpha(alpha: number): void {
    this.ctx.globalAlpha = alpha;
  }
  setFont(font: string): void {
    this.ctx.font = font;
  }
}

// World metres to screen pixels, y up in the world, y down on canvas.
export class Transform {
  private readonly scale: number;
  private readonly padX: number;
  private readonly padY: number;

  constructor(
    private readonly bounds: [number, number, number, number],
    private readonly width: number,
    private readonly height: number,
  ) {
    const bw = bounds[2] - bounds[0];
    const bh = bounds[3] - bounds[1];
    this.scale = Math.min(width / bw, height / bh);
    this.padX = (width - bw * this.scale) / 2;
    this.padY = (height - bh * this.scale) / 2;
  }

  x(wx: number): number {
    return (wx - this.bounds[0]) * this.scale + this.padX;
  }

  y(wy: number): number {
    return this.height - ((wy - this.bounds[1]) * this.scale + this.padY);
  }

  len(d: number): number {
    return d * this.scale;
  }
}

export interface SceneDocs {
  scenario?: ScenarioDoc;
  graph?: GraphDoc;
  paths?: PathsDoc;
  evmap?: FieldDoc;
}

export interface SceneView {
  overlays: Overlays;
  selectedReports: ReadonlySet<string>;
  graphThreshold: number;
  hoveredChain: string[] | null;
}

export interface Scene {
  width: number;
  height: number;
  bounds: [number, number, number, number];
  obstacles: Point[][];
  heat: HeatCell[];
  contours: ContourDoc[];
  sensors: SensorDoc[];
  edges: GraphEdgeDoc[];
  highlight: Point[][];
  markers: ReportMarker[];
  overlays: Overlays;
}

export function buildScene(
  docs: SceneDocs,
  view: SceneView,
  width: number,
  height: number,
): Scene {
  const bounds = docs.scenario?.map.bounds ?? [0, 0, 1, 1];
  const selected = [...view.selectedReports];
  const selectedOne = selected.length === 1 ? selected[0]! : null;
  return {
    width,
    height,
    bounds,
    obstacles:
      docs.scenario?.map.features.map((f) => f.geometry.coordinates[0]!) ?? [],
    heat:
      view.overlays.evidence_map && docs.evmap ? heatCells(docs.evmap) : [],
    contours:
      view.overlays.evidence_map && docs.evmap ? docs.evmap.contours : [],
    sensors: view.overlays.sensors ? (docs.scenario?.sensors ?? []) : [],
    edges:
      view.overlays.graph && docs.graph
        ? graphEdges(docs.graph, selectedOne, view.graphThreshold)
        : [],
    highlight:
      view.overlays.paths && view.hoveredChain && docs.graph
        ? chainPolylines(view.hoveredChain, docs.graph)
        : [],
    markers:
      view.overlays.reports && docs.scenario
        ? reportMarkers(docs.scenario, view.selectedReports)
        : [],
    overlays: view.overlays,
  };
}

function strokePolyline(ctx: Draw2D, tf: Transform, line: Point[]): void {
  if (line.length < 2) return;
  ctx.beginPath();
  ctx.moveTo(tf.x(line[0]![0]), tf.y(line[0]![1]));
  for (let i = 1; i < line.length; i++) {
    ctx.lineTo(tf.x(line[i]![0]), tf.y(line[i]![1]));
  }
  ctx.stroke();
}

export function renderScene(ctx: Draw2D, scene: Scene): void {
  const tf = new Transform(scene.bounds, scene.width, scene.height);
  ctx.save();
  ctx.setGlobalAlpha(1);
  ctx.setFillStyle("#0b1620");
  ctx.beginPath();
  ctx.rect(0, 0, scene.width, scene.height);
  ctx.fill();

  ctx.setFillStyle("#12283a");
  ctx.beginPath();
  ctx.rect(
    tf.x(scene.bounds[0]),
    tf.y(scene.bounds[3]),
    tf.len(scene.bounds[2] - scene.bounds[0]),
    tf.len(scene.bounds[3] - scene.bounds[1]),
  );
  ctx.fill();

  ctx.setGlobalAlpha(0.55);
  for (const cell of scene.heat) {
    ctx.setFillStyle(HEAT_RAMP[cell.ramp]!);
    ctx.beginPath();
    ctx.rect(
      tf.x(cell.x),
      tf.y(cell.y + cell.size),
      tf.len(cell.size),
      tf.len(cell.size),
    );
    ctx.fill();
  }

  ctx.setGlobalAlpha(0.8);
  ctx.setStrokeStyle("#e8e4d8");
  ctx.setLineWidth(1);
  for (const contour of scene.contours) {
    for (const line of contour.lines) strokePolyline(ctx, tf, line);
  }

  ctx.setGlobalAlpha(1);
  ctx.setFillStyle("#4a5568");
  ctx.setStrokeStyle("#2d3748");
  for (const ring of scene.obstacles) {
    if (ring.length < 3) continue;
    ctx.beginPath();
    ctx.moveTo(tf.x(ring[0]![0]), tf.y(ring[0]![1]));
    for (let i = 1; i < ring.length; i++) {
      ctx.lineTo(tf.x(ring[i]![0]), tf.y(ring[i]![1]));
    }
    ctx.closePath();
    ctx.fill();
    ctx.stroke();
  }

  ctx.setStrokeStyle("#63b3ed");
  ctx.setLineWidth(1);
  for (const sensor of scene.sensors) {
    ctx.setGlobalAlpha(0.12);
    ctx.setFillStyle("#63b3ed");
    ctx.beginPath();
    ctx.arc(
      tf.x(sensor.position[0]),
      tf.y(sensor.position[1]),
      tf.len(sensor.range_m),
      0,
      2 * Math.PI,
    );
    ctx.fill();
    ctx.setGlobalAlpha(0.9);
    ctx.beginPath();
    ctx.arc(
      tf.x(sensor.position[0]),
      tf.y(sensor.position[1]),
      tf.len(sensor.range_m),
      0,
      2 * Math.PI,
    );
    ctx.stroke();
  }

  ctx.setGlobalAlpha(0.85);
  ctx.setStrokeStyle("#7aa2f7");
  ctx.setLineWidth(1.5);
  for (const edge of scene.edges) strokePolyline(ctx, tf, edge.path);

  ctx.setGlobalAlpha(1);
  ctx.setStrokeStyle("#f2953b");
  ctx.setLineWidth(3);
  for (const line of scene.highlight) strokePolyline(ctx, tf, line);

  ctx.setFont("11px sans-serif");
  for (const marker of scene.markers) {
    const mx = tf.x(marker.position[0]);
    const my = tf.y(marker.position[1]);
    ctx.setGlobalAlpha(marker.flaggedFalse ? 0.35 : 1);
    ctx.setFillStyle(marker.color);
    ctx.beginPath();
    ctx.arc(mx, my, 5, 0, 2 * Math.PI);
    ctx.fill();
    if (marker.flaggedFalse) {
      ctx.setStrokeStyle("#e53e3e");
      ctx.setLineWidth(1.5);
      ctx.beginPath();
      ctx.moveTo(mx - 6, my - 6);
      ctx.lineTo(mx + 6, my + 6);
      ctx.stroke();
      ctx.beginPath();
      ctx.moveTo(mx - 6, my + 6);
      ctx.lineTo(mx + 6, my - 6);
      ctx.stroke();
    }
    if (marker.selected) {
      ctx.setGlobalAlpha(1);
      ctx.setStrokeStyle("#f7fafc");
      ctx.setLineWidth(2);
      ctx.beginPath();
      ctx.arc(mx, my, 8, 0, 2 * Math.PI);
      ctx.stroke();
      ctx.setFillStyle("#f7fafc");
      ctx.fillText(marker.id, mx + 10, my - 10);
    }
  }
  ctx.restore();
}
