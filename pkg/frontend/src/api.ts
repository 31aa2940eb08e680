// Typed client for the tracking service. Every method maps to one
// documented endpoint; the snapshot token rides as a query parameter on
// the way out and comes back in the X-Snapshot-Token header.

import type {
  CountsDoc,
  ErrorBody,
  FieldDoc,
  FlagResultDoc,
  GraphDoc,
  PathsDoc,
  ScenarioDoc,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(body.error);
    this.name = "ApiError";
  }
}

export interface ApiResponse<T> {
  body: T;
  token: number | null;
}

export interface AnalysisQuery {
  type?: string;
  token?: number;
}

export interface GraphQuery extends AnalysisQuery {
  threshold?: number;
}

export interface PathsQuery extends AnalysisQuery {
  nSubs?: number;
  beam?: boolean;
}

export interface FieldQuery extends AnalysisQuery {
  t?: number;
  cell?: number;
}

function query(pairs: [string, string | number | boolean | undefined][]): string {
  const params = new URLSearchParams();
  for (const [key, value] of pairs) {
    if (value !== undefined) params.set(key, String(value));
  }
  const s = params.toString();
  return s ? `?${s}` : "";
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchLike: FetchLike,
  ) {}

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<ApiResponse<T>> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchLike(this.baseUrl + path, init);
    const raw = res.headers.get("x-snapshot-token");
    const token = raw === null ? null : Number(raw);
    const doc = (await res.json()) as T | ErrorBody;
    if (!res.ok) throw new ApiError(res.status, doc as ErrorBody);
    return { body: doc as T, token };
  }

  scenario(id: string, token?: number): Promise<ApiResponse<ScenarioDoc>> {
    return this.request("GET", `/scenarios/${id}${query([["token", token]])}`);
  }

  graph(id: string, q: GraphQuery = {}): Promise<ApiResponse<GraphDoc>> {
    const qs = query([
      ["type", q.type],
      ["threshold", q.threshold],
      ["token", q.token],
    ]);
    return this.request("GET", `/scenarios/${id}/graph${qs}`);
  }

  paths(id: string, q: PathsQuery = {}): Promise<ApiResponse<PathsDoc>> {
    const qs = query([
      ["type", q.type],
      ["n_subs", q.nSubs],
      ["beam", q.beam],
      ["token", q.token],
    ]);
    return this.request("GET", `/scenarios/${id}/analysis/paths${qs}`);
  }

  counts(id: string, q: AnalysisQuery = {}): Promise<ApiResponse<CountsDoc>> {
    const qs = query([
      ["type", q.type],
      ["token", q.token],
    ]);
    return this.request("GET", `/scenarios/${id}/analysis/counts${qs}`);
  }

  evidenceMap(id: string, q: FieldQuery = {}): Promise<ApiResponse<FieldDoc>> {
    const qs = query([
      ["t", q.t],
      ["cell", q.cell],
      ["type", q.type],
      ["token", q.token],
    ]);
    return this.request("GET", `/scenarios/${id}/evidence-map${qs}`);
  }

  setFlag(
    id: string,
    reportId: string,
    flaggedFalse: boolean,
    token?: number,
  ): Promise<ApiResponse<FlagResultDoc>> {
    const qs = query([["token", token]]);
    return this.request("POST", `/scenarios/${id}/flags${qs}`, {
      report_id: reportId,
      flagged_false: flaggedFalse,
    });
  }
}
