// Service document shapes. Mirrors the JSON the service emits; every
// field rendered anywhere in the UI comes from one of these.

export type Point = [number, number];

export interface ReportDoc {
  id: string;
  time: number;
  position: Point;
  trust_p: number;
  flagged_false: boolean;
  source?: string;
  position_sigma_m?: number;
  observed_course_deg?: number | null;
  observed_type?: string | null;
}

export interface SensorDoc {
  id: string;
  position: Point;
  range_m: number;
  detect_prob: number;
  active_intervals: [number, number][];
  signals: number[];
}

export interface SubTypeDoc {
  id: string;
  name: string;
  cruise_speed_mps: number;
  max_speed_mps: number;
  draught_m: number;
}

export interface MapFeature {
  type: "Feature";
  geometry: { type: "Polygon"; coordinates: Point[][] };
  properties: { min_depth_m: number; name?: string };
}

export interface NavMapDoc {
  type: "FeatureCollection";
  projection: string;
  bounds: [number, number, number, number];
  features: MapFeature[];
}

export interface ScenarioDoc {
  id: string;
  map: NavMapDoc;
  reports: ReportDoc[];
  sensors: SensorDoc[];
  types: SubTypeDoc[];
  assumptions: Record<string, unknown>;
}

export interface GraphNodeDoc {
  id: string;
  time: number;
  position: Point;
  trust_p: number;
}

export interface GraphEdgeDoc {
  from: string;
  to: string;
  q: number;
  plausibility: number;
  factors: Record<string, number>;
  path: Point[];
}

export interface GraphDoc {
  nodes: GraphNodeDoc[];
  edges: GraphEdgeDoc[];
  type: string | null;
}

export interface PathRowDoc {
  rank: number;
  chain: string[];
  support: number;
  plausibility: number;
}

export interface PathsDoc {
  paths: PathRowDoc[];
  conflict_k: number;
  n_subs: number;
  approximate: boolean;
}

export interface CountsDoc {
  min_count: number;
  intervals: Record<string, [number, number]>;
}

export interface ContourDoc {
  level: number;
  lines: Point[][];
}

export interface FieldDoc {
  cell_size: number;
  origin: Point;
  width: number;
  height: number;
  values: number[];
  contours: ContourDoc[];
}

export interface FlagResultDoc {
  report_id: string;
  flagged_false: boolean;
  token: number;
}

export interface ErrorBody {
  error: string;
  field?: string;
  token?: number;
}

// View-state shape shared by the store and the renderer.
export interface Overlays {
  reports: boolean;
  sensors: boolean;
  graph: boolean;
  evidence_map: boolean;
  paths: boolean;
}
