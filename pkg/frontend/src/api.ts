import type { ApiError, RunSnapshot, RunSummary } from "./types.js";

/** Thin typed client for the orchestrator HTTP API. */
export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async submitRun(
    hypothesisText: string,
    config?: Record<string, unknown>,
  ): Promise<string> {
    const res = await fetch(this.url("/api/runs"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ hypothesis_text: hypothesisText, config }),
    });
    const body = await res.json();
    if (!res.ok) {
      throw new ApiRequestError(body.error ?? { code: `http_${res.status}` });
    }
    return body.run_id as string;
  }

  async getRun(runId: string): Promise<RunSnapshot> {
    const res = await fetch(this.url(`/api/runs/${runId}`));
    if (!res.ok) throw new ApiRequestError({ code: `http_${res.status}` });
    return (await res.json()) as RunSnapshot;
  }

  async listRuns(): Promise<RunSummary[]> {
    const res = await fetch(this.url("/api/runs"));
    if (!res.ok) throw new ApiRequestError({ code: `http_${res.status}` });
    return ((await res.json()).runs ?? []) as RunSummary[];
  }

  async abortRun(runId: string): Promise<void> {
    const res = await fetch(this.url(`/api/runs/${runId}/abort`), { method: "POST" });
    if (!res.ok) throw new ApiRequestError({ code: `http_${res.status}` });
  }

  eventsUrl(runId: string): string {
    return this.url(`/api/runs/${runId}/events`);
  }
}

export class ApiRequestError extends Error {
  constructor(readonly apiError: ApiError) {
    super(formatApiError(apiError));
  }
}

export function formatApiError(err: ApiError): string {
  if (err.diagnostics?.length) return `${err.code}: ${err.diagnostics.join("; ")}`;
  if (err.message) return `${err.code}: ${err.message}`;
  return err.code;
}
