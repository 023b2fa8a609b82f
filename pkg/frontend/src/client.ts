/**
 * Session API client. All numbers displayed anywhere in the UI come from
 * these responses; the client never computes timing or PPA itself. The raw
 * response body of the last call is kept so views can show the server's
 * own serialization of a value byte-for-byte.
 */

import type {
  ActionsBody,
  FloorplanRect,
  PlanBody,
  RecommendationBody,
  SessionState,
  SpeedupsBody,
  TransformRequest,
} from "./types";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

export class SessionClient {
  lastRawBody = "";

  constructor(readonly baseUrl: string = "http://127.0.0.1:8000") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        // plain-text error body
      }
      throw new ApiError(response.status, String(detail));
    }
    this.lastRawBody = text;
    return JSON.parse(text) as T;
  }

  createSession(cus: number, variant = "baseline"): Promise<SessionState> {
    return this.call("POST", "/sessions", { cus, variant });
  }

  loadSession(designDoc: string): Promise<SessionState> {
    return this.call("POST", "/sessions", { design_doc: designDoc });
  }

  getSession(sid: string): Promise<SessionState> {
    return this.call("GET", `/sessions/${sid}`);
  }

  getActions(sid: string): Promise<ActionsBody> {
    return this.call("GET", `/sessions/${sid}/actions`);
  }

  getFloorplan(sid: string): Promise<{ rects: FloorplanRect[] }> {
    return this.call("GET", `/sessions/${sid}/floorplan`);
  }

  getTiming(sid: string): Promise<{ report: string }> {
    return this.call("GET", `/sessions/${sid}/timing`);
  }

  getRecommendation(sid: string, targetMhz?: number): Promise<RecommendationBody> {
    const q = targetMhz === undefined ? "" : `?target_mhz=${targetMhz}`;
    return this.call("GET", `/sessions/${sid}/recommendation${q}`);
  }

  applyTransform(sid: string, action: TransformRequest): Promise<SessionState> {
    return this.call("POST", `/sessions/${sid}/transform`, action);
  }

  undo(sid: string): Promise<SessionState> {
    return this.call("POST", `/sessions/${sid}/undo`);
  }

  plan(sid: string, targetMhz: number, wireModel = false): Promise<PlanBody> {
    return this.call("POST", `/sessions/${sid}/plan`, {
      target_mhz: targetMhz,
      wire_model: wireModel,
    });
  }

  setMeasuredDelays(sid: string, delays: Record<string, number>): Promise<RecommendationBody> {
    return this.call("PUT", `/sessions/${sid}/measured-delays`, { delays });
  }

  clearMeasuredDelays(sid: string): Promise<RecommendationBody> {
    return this.call("DELETE", `/sessions/${sid}/measured-delays`);
  }

  getSpeedups(): Promise<SpeedupsBody> {
    return this.call("GET", "/speedups");
  }
}

/**
 * Pull the server's literal serialization of a top-level numeric field out
 * of a raw JSON body. Used by the parity harness and the readouts so the
 * displayed text is exactly what the server sent.
 */
export function rawNumberField(rawBody: string, field: string): string {
  const match = rawBody.match(new RegExp(`"${field}":\\s*([^,}\\]]+)`));
  if (!match) throw new Error(`field '${field}' not in response body`);
  return match[1].trim();
}
