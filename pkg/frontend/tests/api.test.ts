import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, NetworkError } from "../src/api";
import { loadReport, loadScenario } from "./helpers";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("returns the parsed report for a 200", async () => {
    const report = loadReport("location_a.json");
    const client = new ApiClient("http://svc", async () => jsonResponse(200, report));
    const result = await client.forecast(loadScenario("location_a.json"));
    expect(result.stale).toBe(false);
    expect(result.data.recommendation.option).toBe(report.recommendation.option);
  });

  it("throws ApiError with the service payload on 4xx", async () => {
    const payload = { code: "invalid_scenario", message: "bad", field_path: "user.traits" };
    const client = new ApiClient("http://svc", async () => jsonResponse(400, payload));
    await expect(client.forecast(loadScenario("location_a.json"))).rejects.toMatchObject({
      status: 400,
      payload,
    });
  });

  it("wraps fetch failures in NetworkError for retry affordances", async () => {
    const client = new ApiClient("http://svc", async () => {
      throw new TypeError("connection refused");
    });
    await expect(client.forecast(loadScenario("location_a.json"))).rejects.toBeInstanceOf(
      NetworkError
    );
  });

  it("marks responses stale when a newer request superseded them", async () => {
    const report = loadReport("location_a.json");
    let release: (() => void) | null = null;
    const slow = new Promise<void>((resolve) => {
      release = resolve;
    });
    let calls = 0;
    const client = new ApiClient("http://svc", async () => {
      calls += 1;
      if (calls === 1) await slow; // first request resolves last
      return jsonResponse(200, report);
    });

    const scenario = loadScenario("location_a.json");
    const first = client.forecast(scenario);
    const second = client.forecast(scenario);
    const secondResult = await second;
    expect(secondResult.stale).toBe(false);
    release!();
    const firstResult = await first;
    expect(firstResult.stale).toBe(true);
  });

  it("keeps channels independent", async () => {
    const report = loadReport("location_a.json");
    const compare = { reports: [report], ranking: [0] };
    const client = new ApiClient("http://svc", async (url) =>
      jsonResponse(200, url.endsWith("/compare") ? compare : report)
    );
    const scenario = loadScenario("location_a.json");
    const [f, c] = await Promise.all([client.forecast(scenario), client.compare([scenario])]);
    expect(f.stale).toBe(false);
    expect(c.stale).toBe(false);
    expect(c.data.ranking).toEqual([0]);
  });
});
