/** Typed client for the evaluation service; every mutation flows through
 * these documented endpoints (the workbench keeps no private persistence). */

import type { Criterion, Session, TaskPayload, TieBreak, RubricScore } from "./types.js";

export class ApiRequestError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class WorkbenchApi {
  private readonly base: string;
  private readonly token: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, token: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.token = token;
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.base}/api/v1${path}`, {
      method,
      headers: {
        "Content-Type": "application/json",
        "X-Evaluator-Token": this.token,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = `http-${response.status}`;
      let message = response.statusText;
      try {
        const parsed = (await response.json()) as { code?: string; message?: string };
        code = parsed.code ?? code;
        message = parsed.message ?? message;
      } catch {
        // non-JSON error body; keep the status fallback
      }
      throw new ApiRequestError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; run_id: string }> {
    return this.request("GET", "/health");
  }

  createSession(mode: "calibration" | "formal", runId?: string): Promise<Session> {
    return this.request("POST", "/sessions", { mode, run_id: runId });
  }

  getSession(sessionId: string): Promise<Session> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  getTask(taskId: string): Promise<TaskPayload> {
    return this.request("GET", `/tasks/${encodeURIComponent(taskId)}`);
  }

  submitScore(
    taskId: string,
    scores: Record<Criterion, number>,
    justification: string,
  ): Promise<RubricScore> {
    return this.request("POST", `/tasks/${encodeURIComponent(taskId)}/scores`, {
      scores,
      justification,
    });
  }

  listTiebreaks(): Promise<TieBreak[]> {
    return this.request("GET", "/tiebreaks");
  }

  resolveTiebreak(taskId: string, ordering: string[]): Promise<TieBreak> {
    return this.request("POST", `/tiebreaks/${encodeURIComponent(taskId)}/resolution`, {
      ordering,
    });
  }
}
