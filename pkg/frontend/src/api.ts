import type {
  HealthResponse,
  MessageResponse,
  NeighborsResponse,
  SessionCreated,
} from "./types.js";

/** Service-level failure: HTTP status plus the error code from the body, if any. */
export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly code: string | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Thin typed wrapper over the service endpoints. */
export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      let detail = `${response.status} ${response.statusText}`;
      let code: string | null = null;
      try {
        const payload: unknown = await response.json();
        if (payload && typeof payload === "object") {
          const p = payload as { detail?: unknown; error?: unknown };
          if (typeof p.detail === "string") detail = p.detail;
          if (typeof p.error === "string") code = p.error;
        }
      } catch {
        // non-JSON error body, keep the status line
      }
      throw new ApiError(detail, response.status, code);
    }
    return (await response.json()) as T;
  }

  createSession(): Promise<SessionCreated> {
    return this.request("POST", "/sessions");
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/messages`, { text });
  }

  neighbors(entity: string, k = 5): Promise<NeighborsResponse> {
    return this.request("GET", `/kg/neighbors?entity=${encodeURIComponent(entity)}&k=${k}`);
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }
}
