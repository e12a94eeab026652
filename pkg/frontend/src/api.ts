/** Minimal typed client for the resolver service. */

import type { ParseResponse, ReasonRequest, ReasonResponse, Vocab } from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function readDetail(res: Response): Promise<string> {
  let text = "";
  try {
    text = await res.text();
  } catch {
    /* fall through to the status fallback */
  }
  try {
    const detail = (JSON.parse(text) as { detail?: unknown }).detail;
    if (typeof detail === "string" && detail) return detail;
    if (Array.isArray(detail)) {
      return detail
        .map((d) => (typeof d === "string" ? d : JSON.stringify(d)))
        .join("; ");
    }
  } catch {
    /* body was not JSON */
  }
  return text || `request failed with status ${res.status}`;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let res: Response;
    try {
      res = await this.fetchImpl(this.base + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : "network error");
    }
    if (!res.ok) throw new ApiError(res.status, await readDetail(res));
    return (await res.json()) as T;
  }

  health(): Promise<{ ok: boolean }> {
    return this.request("GET", "/api/health");
  }

  vocab(): Promise<Vocab> {
    return this.request("GET", "/api/vocab");
  }

  parse(instruction: string): Promise<ParseResponse> {
    return this.request("POST", "/api/parse", { instruction });
  }

  reason(req: ReasonRequest): Promise<ReasonResponse> {
    return this.request("POST", "/api/reason", req);
  }
}
