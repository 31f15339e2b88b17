// Shared fixtures and a fetch stub for unit tests.

import type { Artifact, TraceLink } from "../src/types.js";

export function artifact(id: string, type: string, overrides: Partial<Artifact> = {}): Artifact {
  return {
    id,
    type,
    name: overrides.name ?? id,
    body: overrides.body ?? "",
    provenance: "manual",
    attributes: {},
    ...overrides,
  };
}

export function link(
  childId: string,
  parentId: string,
  status: TraceLink["status"] = "approved",
  score?: number,
): TraceLink {
  return {
    childId,
    parentId,
    status,
    score,
    createdBy: status === "manual" ? "user" : "trace-engine",
  };
}

type Responder = (url: string, init?: RequestInit) => unknown;

/** Install a URL-pattern keyed fetch stub; returns the recorded call log. */
export function stubFetch(routes: Record<string, Responder>): string[] {
  const calls: string[] = [];
  (globalThis as { fetch: unknown }).fetch = async (
    input: string | URL,
    init?: RequestInit,
  ) => {
    const url = String(input);
    calls.push(`${init?.method ?? "GET"} ${url}`);
    for (const [pattern, responder] of Object.entries(routes)) {
      if (url.includes(pattern)) {
        const payload = responder(url, init);
        return {
          ok: true,
          status: 200,
          statusText: "OK",
          json: async () => payload,
        } as Response;
      }
    }
    return {
      ok: false,
      status: 404,
      statusText: "Not Found",
      json: async () => ({ error: "UnknownId", message: `no route for ${url}` }),
    } as Response;
  };
  return calls;
}
