// Thin typed client for the /v1 session API.

import type {
  Advisor,
  Cell,
  HistoryDoc,
  RenderModel,
  RoundRecord,
  SessionRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }
}

async function parse<T>(resp: Response): Promise<T> {
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, (body as { detail?: unknown }).detail ?? resp.statusText);
  }
  return body as T;
}

export class SessionApi {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}/v1${path}`;
  }

  async createSession(request: SessionRequest): Promise<{ session_id: string; state: RenderModel }> {
    const resp = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    return parse(resp);
  }

  async getState(sessionId: string): Promise<RenderModel> {
    return parse(await fetch(this.url(`/sessions/${sessionId}/state`)));
  }

  async getAdvisor(sessionId: string, nation: number): Promise<Advisor> {
    return parse(await fetch(this.url(`/sessions/${sessionId}/advisor/${nation}`)));
  }

  async postPlacement(sessionId: string, nation: number, cell: Cell): Promise<{ accepted: boolean }> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/placements`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ nation, cell }),
    });
    return parse(resp);
  }

  async advance(sessionId: string): Promise<{ record: RoundRecord }> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/advance`), { method: "POST" });
    return parse(resp);
  }

  async getHistory(sessionId: string): Promise<HistoryDoc> {
    return parse(await fetch(this.url(`/sessions/${sessionId}/history`)));
  }
}
