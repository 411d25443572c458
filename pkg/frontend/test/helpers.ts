import type { MessageResponse } from "../src/types.js";
import introducingJson from "./fixtures/introducing_response.json";
import generalJson from "./fixtures/general_response.json";

/** Real service responses recorded from the packaged fixture corpus. */
export const introducingResponse = introducingJson as unknown as MessageResponse;
export const generalResponse = generalJson as unknown as MessageResponse;

export function jsonResponse(payload: unknown, status = 200): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: () => Promise.resolve(payload),
  } as unknown as Response;
}

export type FetchStub = (url: string, init?: RequestInit) => Promise<Response>;

/** Route fetch calls by method + path; unknown routes fail loudly. */
export function stubFetch(routes: Record<string, () => Promise<Response>>): string[] {
  const calls: string[] = [];
  globalThis.fetch = ((url: string, init?: RequestInit) => {
    const method = init?.method ?? "GET";
    const path = url.split("?")[0];
    const key = `${method} ${path}`;
    calls.push(key);
    const route = routes[key];
    if (!route) return Promise.reject(new TypeError(`unrouted: ${key}`));
    return route();
  }) as typeof fetch;
  return calls;
}
