/** Thin fetch client for the planner service.  At most one solve is in
 *  flight per client; submitting a new one cancels the superseded request. */

import type {
  ApiErrorBody,
  GenerateResponse,
  Inventory,
  SolveResponse,
  TravelRequest,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(`${body.error}: ${body.detail}`);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { error: `HTTP ${response.status}`, detail: response.statusText };
  }
  return new ApiError(response.status, body);
}

export class ApiClient {
  private inflightSolve: AbortController | null = null;

  constructor(public baseUrl: string) {}

  async health(): Promise<{ status: string; version: string }> {
    const r = await fetch(`${this.baseUrl}/api/health`);
    if (!r.ok) throw await parseError(r);
    return r.json();
  }

  async generate(seed: number, config?: object): Promise<GenerateResponse> {
    const r = await fetch(`${this.baseUrl}/api/generate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config ? { seed, config } : { seed }),
    });
    if (!r.ok) throw await parseError(r);
    return r.json();
  }

  /** Solve a request; a newer call aborts the one still in flight. */
  async solve(
    request: TravelRequest,
    inventory?: Inventory,
  ): Promise<SolveResponse> {
    this.inflightSolve?.abort();
    const controller = new AbortController();
    this.inflightSolve = controller;
    const payload: Record<string, unknown> = { request };
    if (inventory) payload.inventory = inventory;
    try {
      const r = await fetch(`${this.baseUrl}/api/solve`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(payload),
        signal: controller.signal,
      });
      if (!r.ok) throw await parseError(r);
      return (await r.json()) as SolveResponse;
    } finally {
      if (this.inflightSolve === controller) this.inflightSolve = null;
    }
  }
}
