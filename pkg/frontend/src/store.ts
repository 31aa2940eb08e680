// Single-threaded view-state container. Every server read is issued
// with the current snapshot token and tagged with a per-key sequence
// number; a response only lands if it is still the newest request for
// its key and the token has not moved on. Everything rendered is
// therefore traceable to one response for the current token.

import { ApiClient, ApiError, type ApiResponse } from "./api.js";
import type {
  CountsDoc,
  FieldDoc,
  GraphDoc,
  Overlays,
  PathsDoc,
  ScenarioDoc,
} from "./types.js";

export interface Toast {
  status: number | null;
  message: string;
}

export interface ViewState {
  scenarioId: string;
  token: number | null;
  tSlider: number;
  selectedReports: Set<string>;
  overlays: Overlays;
  assumedType: string | null;
  graphThreshold: number;
  hoveredChain: string[] | null;
}

export interface Docs {
  scenario?: ScenarioDoc;
  graph?: GraphDoc;
  paths?: PathsDoc;
  counts?: CountsDoc;
  evmap?: FieldDoc;
}

export const SLIDER_DEBOUNCE_MS = 150;

export function maxActiveTime(scenario: ScenarioDoc): number {
  let t = 0;
  for (const r of scenario.reports) {
    if (!r.flagged_false && r.time > t) t = r.time;
  }
  return t;
}

export class Store {
  readonly state: ViewState;
  readonly docs: Docs = {};
  readonly toasts: Toast[] = [];
  private readonly seq = new Map<string, number>();
  private readonly listeners = new Set<() => void>();
  private sliderTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly api: ApiClient,
    scenarioId: string,
  ) {
    this.state = {
      scenarioId,
      token: null,
      tSlider: 0,
      selectedReports: new Set(),
      overlays: {
        reports: true,
        sensors: true,
        graph: true,
        evidence_map: true,
        paths: true,
      },
      assumedType: null,
      graphThreshold: 0,
      hoveredChain: null,
    };
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  private pushToast(err: unknown): void {
    if (err instanceof ApiError) {
      this.toasts.push({ status: err.status, message: err.body.error });
    } else {
      this.toasts.push({ status: null, message: String(err) });
    }
    this.emit();
  }

  dismissToast(index: number): void {
    this.toasts.splice(index, 1);
    this.emit();
  }

  private async issue<T>(
    key: string,
    call: () => Promise<ApiResponse<T>>,
    apply: (res: ApiResponse<T>) => void,
  ): Promise<void> {
    const mySeq = (this.seq.get(key) ?? 0) + 1;
    this.seq.set(key, mySeq);
    const myToken = this.state.token;
    try {
      const res = await call();
      if (this.seq.get(key) !== mySeq) return;
      if (this.state.token !== myToken) return;
      apply(res);
      this.emit();
    } catch (err) {
      if (this.seq.get(key) === mySeq && this.state.token === myToken) {
        this.pushToast(err);
      }
    }
  }

  private tokenParam(): number | undefined {
    return this.state.token ?? undefined;
  }

  private typeParam(): string | undefined {
    return this.state.assumedType ?? undefined;
  }

  async load(): Promise<void> {
    await this.issue(
      "scenario",
      () => this.api.scenario(this.state.scenarioId),
      (res) => {
        this.docs.scenario = res.body;
        this.state.token = res.token;
        this.state.tSlider = maxActiveTime(res.body);
      },
    );
    await this.refreshAnalyses();
  }

  private refreshScenario(): Promise<void> {
    return this.issue(
      "scenario",
      () => this.api.scenario(this.state.scenarioId, this.tokenParam()),
      (res) => {
        this.docs.scenario = res.body;
      },
    );
  }

  private fetchGraph(): Promise<void> {
    return this.issue(
      "graph",
      () =>
        this.api.graph(this.state.scenarioId, {
          type: this.typeParam(),
          threshold:
            this.state.graphThreshold > 0
              ? this.state.graphThreshold
              : undefined,
          token: this.tokenParam(),
        }),
      (res) => {
        this.docs.graph = res.body;
      },
    );
  }

  private fetchEvidenceMap(): Promise<void> {
    return this.issue(
      "evmap",
      () =>
        this.api.evidenceMap(this.state.scenarioId, {
          t: this.state.tSlider,
          type: this.typeParam(),
          token: this.tokenParam(),
        }),
      (res) => {
        this.docs.evmap = res.body;
      },
    );
  }

  async refreshAnalyses(): Promise<void> {
    await Promise.all([
      this.fetchGraph(),
      this.issue(
        "paths",
        () =>
          this.api.paths(this.state.scenarioId, {
            type: this.typeParam(),
            token: this.tokenParam(),
          }),
        (res) => {
          this.docs.paths = res.body;
        },
      ),
      this.issue(
        "counts",
        () =>
          this.api.counts(this.state.scenarioId, {
            type: this.typeParam(),
            token: this.tokenParam(),
          }),
        (res) => {
          this.docs.counts = res.body;
        },
      ),
      this.fetchEvidenceMap(),
    ]);
  }

  // Slider scrubs re-query the evidence map after a short quiet period;
  // each request carries the token current at send time.
  setSlider(t: number): void {
    this.state.tSlider = t;
    this.emit();
    if (this.sliderTimer !== null) clearTimeout(this.sliderTimer);
    this.sliderTimer = setTimeout(() => {
      this.sliderTimer = null;
      void this.fetchEvidenceMap();
    }, SLIDER_DEBOUNCE_MS);
  }

  async toggleFlag(reportId: string): Promise<void> {
    const report = this.docs.scenario?.reports.find((r) => r.id === reportId);
    if (!report) return;
    let flagged: boolean;
    try {
      const res = await this.api.setFlag(
        this.state.scenarioId,
        reportId,
        !report.flagged_false,
        this.tokenParam(),
      );
      this.state.token = res.body.token;
      flagged = res.body.flagged_false;
    } catch (err) {
      this.pushToast(err);
      return;
    }
    report.flagged_false = flagged;
    this.emit();
    await Promise.all([this.refreshScenario(), this.refreshAnalyses()]);
  }

  async setType(typeId: string | null): Promise<void> {
    this.state.assumedType = typeId;
    this.emit();
    await this.refreshAnalyses();
  }

  async setThreshold(threshold: number): Promise<void> {
    this.state.graphThreshold = threshold;
    this.emit();
    await this.fetchGraph();
  }

  toggleSelect(reportId: string): void {
    if (this.state.selectedReports.has(reportId)) {
      this.state.selectedReports.delete(reportId);
    } else {
      this.state.selectedReports.add(reportId);
    }
    this.emit();
  }

  setHoveredChain(chain: string[] | null): void {
    this.state.hoveredChain = chain;
    this.emit();
  }

  toggleOverlay(key: keyof Overlays): void {
    this.state.overlays[key] = !this.state.overlays[key];
    this.emit();
  }
}
