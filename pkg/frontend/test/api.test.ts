// Client-level contract: each method issues exactly the documented
// endpoint (recorded URLs are the source of truth), parses the snapshot
// token header, and surfaces error bodies unchanged.

import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { ErrorBody, GraphDoc, PathsDoc } from "../src/types.js";
import { loadRecorded, recordedFetch } from "./helpers.js";

function client(names: string[]) {
  const rf = recordedFetch(names);
  return { api: new ApiClient("", rf.fetchLike), rf };
}

describe("endpoint shapes", () => {
  it("builds the recorded URLs verbatim", async () => {
    const { api, rf } = client([
      "scenario",
      "graph",
      "graph_threshold05",
      "graph_patrol",
      "paths",
      "counts",
      "evmap_default",
      "evmap_patrol",
      "flag_a01",
    ]);
    await api.scenario("archipelago");
    await api.graph("archipelago", { token: 1 });
    await api.graph("archipelago", { threshold: 0.5, token: 1 });
    await api.graph("archipelago", { type: "patrol", token: 1 });
    await api.paths("archipelago", { token: 1 });
    await api.counts("archipelago", { token: 1 });
    await api.evidenceMap("archipelago", { t: 1380000, token: 1 });
    await api.evidenceMap("archipelago", {
      t: 1380000,
      type: "patrol",
      token: 1,
    });
    await api.setFlag("archipelago", "a01", true, 1);

    expect(rf.requests.map((r) => `${r.method} ${r.url}`)).toEqual([
      "GET /scenarios/archipelago",
      "GET /scenarios/archipelago/graph?token=1",
      "GET /scenarios/archipelago/graph?threshold=0.5&token=1",
      "GET /scenarios/archipelago/graph?type=patrol&token=1",
      "GET /scenarios/archipelago/analysis/paths?token=1",
      "GET /scenarios/archipelago/analysis/counts?token=1",
      "GET /scenarios/archipelago/evidence-map?t=1380000&token=1",
      "GET /scenarios/archipelago/evidence-map?t=1380000&type=patrol&token=1",
      "POST /scenarios/archipelago/flags?token=1",
    ]);
  });

  it("sends the documented flag body", async () => {
    const { api, rf } = client(["flag_a01"]);
    await api.setFlag("archipelago", "a01", true, 1);
    expect(rf.requests[0]!.body).toEqual(
      loadRecorded("flag_a01").request_body,
    );
  });
});

describe("responses", () => {
  it("parses body and snapshot token", async () => {
    const { api } = client(["graph"]);
    const res = await api.graph("archipelago", { token: 1 });
    expect(res.token).toBe(1);
    expect(res.body).toEqual(loadRecorded("graph").body);
  });

  it("flag response carries the new token", async () => {
    const { api } = client(["flag_a01"]);
    const res = await api.setFlag("archipelago", "a01", true, 1);
    expect(res.body.token).toBe(2);
    expect(res.token).toBe(2);
  });

  it("throws the recorded 409 body on a stale token", async () => {
    const { api } = client(["stale_graph"]);
    const err = await api
      .graph("archipelago", { token: 1 })
      .then(() => null)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(409);
    expect(apiErr.body).toEqual(loadRecorded("stale_graph").body);
    expect(apiErr.body.token).toBe(2);
  });

  it("throws the recorded 422 body on an analysis refusal", async () => {
    const { api } = client(["paths_limit_422"]);
    const err = await api
      .paths("archipelago", { token: 4 })
      .then(() => null)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(422);
    expect(apiErr.body.error).toBe(
      (loadRecorded("paths_limit_422").body as ErrorBody).error,
    );
  });
});

describe("recorded cross-checks", () => {
  it("server-side threshold only returns edges above it", () => {
    const doc = loadRecorded("graph_threshold05").body as GraphDoc;
    const all = loadRecorded("graph").body as GraphDoc;
    expect(doc.edges.length).toBeGreaterThan(0);
    expect(doc.edges.length).toBeLessThan(all.edges.length);
    for (const e of doc.edges) expect(e.plausibility).toBeGreaterThan(0.5);
  });

  it("flagging a report removes it from ranked chains", () => {
    const before = loadRecorded("paths").body as PathsDoc;
    const after = loadRecorded("paths_after_flag").body as PathsDoc;
    expect(before.paths.some((r) => r.chain.includes("a01"))).toBe(true);
    expect(after.paths.some((r) => r.chain.includes("a01"))).toBe(false);
  });
});
