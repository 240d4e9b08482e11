/**
 * Typed client for the simulation service. /simulate keeps a single
 * in-flight request: issuing a new one aborts its predecessor, and stale
 * responses are discarded so results always apply in request order.
 */

import type {
  BaselineResponse,
  HealthResponse,
  PresetsResponse,
  SchemeDoc,
  SimulateOutcome,
} from "./types.js";

export class ApiClient {
  private controller: AbortController | null = null;
  private sequence = 0;

  constructor(readonly baseUrl: string) {}

  async health(): Promise<HealthResponse> {
    return this.getJson("/health");
  }

  async baseline(): Promise<BaselineResponse> {
    return this.getJson("/baseline");
  }

  async presets(): Promise<PresetsResponse> {
    return this.getJson("/presets");
  }

  /**
   * POST the scheme; resolves to null when superseded by a newer request.
   */
  async simulate(scheme: SchemeDoc): Promise<SimulateOutcome | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const ticket = ++this.sequence;

    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/simulate`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ scheme }),
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) return null;
      return { kind: "network", message: String(err) };
    }
    if (ticket !== this.sequence) return null; // a newer request won

    if (response.ok) {
      return { kind: "ok", response: await response.json() };
    }
    const body = await response.json().catch(() => ({ detail: response.statusText }));
    if (response.status === 422 && body.detail?.error === "infeasible_neutrality") {
      return { kind: "infeasible", detail: body.detail };
    }
    return {
      kind: "rejected",
      status: response.status,
      message: typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail),
    };
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw new Error(`${path} failed: HTTP ${response.status}`);
    }
    return response.json() as Promise<T>;
  }
}
