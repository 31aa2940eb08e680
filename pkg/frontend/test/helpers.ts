// Shared plumbing for the contract tests: load recorded service
// responses and serve them through a fetch stub that captures every
// request. A test picks the recordings matching the era it simulates
// (the same URL can map to different responses before and after a
// mutation, e.g. a fresh read vs a stale-token 409).

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export interface Recording {
  method: string;
  url: string;
  status: number;
  token: string | null;
  body: unknown;
  request_body?: unknown;
}

export function loadRecorded(name: string): Recording {
  return JSON.parse(
    readFileSync(join(HERE, "recorded", `${name}.json`), "utf-8"),
  ) as Recording;
}

export function recordedText(name: string): string {
  return readFileSync(join(HERE, "recorded", `${name}.json`), "utf-8");
}

// Key ignores query-parameter order but nothing else.
function keyOf(method: string, url: string): string {
  const u = new URL(url, "http://recorded");
  const pairs = [...u.searchParams.entries()].sort(([a], [b]) =>
    a < b ? -1 : a > b ? 1 : 0,
  );
  const qs = pairs.map(([k, v]) => `${k}=${v}`).join("&");
  return `${method} ${u.pathname}?${qs}`;
}

export interface CapturedRequest {
  method: string;
  url: string;
  body?: unknown;
}

export interface RecordedFetch {
  fetchLike: FetchLike;
  requests: CapturedRequest[];
  /** Hold every response from now on until release() is called. */
  defer(): void;
  release(): Promise<void>;
}

export function recordedFetch(names: string[]): RecordedFetch {
  const table = new Map<string, Recording>();
  for (const name of names) {
    const rec = loadRecorded(name);
    table.set(keyOf(rec.method, rec.url), rec);
  }
  const requests: CapturedRequest[] = [];
  let holds: (() => void)[] | null = null;

  const fetchLike: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const captured: CapturedRequest = { method, url };
    if (init?.body !== undefined) captured.body = JSON.parse(String(init.body));
    requests.push(captured);
    const rec = table.get(keyOf(method, url));
    if (!rec) throw new Error(`no recording for ${method} ${url}`);
    if (holds !== null) {
      await new Promise<void>((resolve) => holds!.push(resolve));
    }
    const headers: Record<string, string> = {
      "content-type": "application/json",
    };
    if (rec.token !== null) headers["x-snapshot-token"] = rec.token;
    return new Response(JSON.stringify(rec.body), {
      status: rec.status,
      headers,
    });
  };

  return {
    fetchLike,
    requests,
    defer(): void {
      holds = [];
    },
    async release(): Promise<void> {
      const pending = holds ?? [];
      holds = null;
      for (const resolve of pending) resolve();
      // a few microtask turns so res.json() and the apply step settle
      // without relying on real timers (tests may have faked them)
      for (let i = 0; i < 10; i++) await Promise.resolve();
    },
  };
}

export const BASE_RECORDINGS = [
  "scenario",
  "graph",
  "paths",
  "counts",
  "evmap_default",
];
