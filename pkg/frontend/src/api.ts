/**
 * Typed client for the forecast service.
 *
 * Concurrent requests are correlated by a monotonically increasing request
 * id; responses arriving for anything but the newest request of a channel
 * are reported stale so the caller can discard them.
 */

import type { ApiErrorPayload, ComparePayload, ReportPayload, ScenarioPayload } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: ApiErrorPayload
  ) {
    super(payload.message);
  }
}

export class NetworkError extends Error {}

export interface ApiResult<T> {
  data: T;
  requestId: number;
  stale: boolean;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private nextRequestId = 1;
  private newestByChannel = new Map<string, number>();

  constructor(
    public baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init)
  ) {}

  private async post<T>(path: string, body: unknown, channel: string): Promise<ApiResult<T>> {
    const requestId = this.nextRequestId++;
    this.newestByChannel.set(channel, requestId);
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (cause) {
      throw new NetworkError(`cannot reach ${this.baseUrl}: ${String(cause)}`);
    }
    const text = await response.text();
    if (!response.ok) {
      let payload: ApiErrorPayload;
      try {
        payload = JSON.parse(text) as ApiErrorPayload;
      } catch {
        payload = { code: "internal", message: text || response.statusText, field_path: null };
      }
      throw new ApiError(response.status, payload);
    }
    const stale = this.newestByChannel.get(channel) !== requestId;
    return { data: JSON.parse(text) as T, requestId, stale };
  }

  forecast(scenario: ScenarioPayload): Promise<ApiResult<ReportPayload>> {
    return this.post<ReportPayload>("/api/v1/forecast", scenario, "forecast");
  }

  compare(scenarios: ScenarioPayload[]): Promise<ApiResult<ComparePayload>> {
    return this.post<ComparePayload>("/api/v1/compare", { scenarios }, "compare");
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.fetchImpl(`${this.baseUrl}/healthz`);
      return response.ok;
    } catch {
      return false;
    }
  }
}
