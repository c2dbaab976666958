import { describe, expect, it } from "vitest";

import {
  buildForecastView,
  checkStackAgainstTotal,
  seriesLengthsConsistent,
  stackSeries,
} from "../src/views";
import { REPORT_FIXTURES, loadReport } from "./helpers";

describe("stackSeries", () => {
  it("stacks cumulative offsets in order", () => {
    const stacked = stackSeries({ a: [1, 2], b: [3, 4] }, ["a", "b"]);
    expect(stacked[0].lower).toEqual([0, 0]);
    expect(stacked[0].upper).toEqual([1, 2]);
    expect(stacked[1].lower).toEqual([1, 2]);
    expect(stacked[1].upper).toEqual([4, 6]);
  });

  it("checks the stack top against a total", () => {
    const stacked = stackSeries({ a: [0.25, 0.5], b: [0.25, 0.25] });
    expect(checkStackAgainstTotal(stacked, [0.5, 0.75]).passed).toBe(true);
    expect(checkStackAgainstTotal(stacked, [0.5, 0.8]).passed).toBe(false);
  });
});

describe("buildForecastView on real API payloads", () => {
  for (const name of REPORT_FIXTURES) {
    it(`renders ${name} without any model math drift`, () => {
      const report = loadReport(name);
      const view = buildForecastView(report);

      // rendered option values and badge are the API values, exactly
      expect(view.options.map((o) => o.value)).toEqual(report.options.map((o) => o.value));
      expect(view.badge.option).toBe(report.recommendation.option);
      expect(view.badge.margin).toBe(report.recommendation.margin);

      // by-quality and by-group stacked areas reproduce the total curve
      expect(view.qualityStackCheck.passed).toBe(true);
      expect(view.qualityStackCheck.maxError).toBeLessThanOrEqual(1e-6);
      expect(view.groupStackCheck.passed).toBe(true);
      expect(view.groupStackCheck.maxError).toBeLessThanOrEqual(1e-6);

      // every chart series runs the full grid
      expect(seriesLengthsConsistent(view)).toBe(true);
    });
  }

  it("shows three option curves with a relationship, two without", () => {
    expect(buildForecastView(loadReport("with_partner_28.json")).options).toHaveLength(3);
    expect(buildForecastView(loadReport("location_a.json")).options).toHaveLength(2);
  });

  it("keeps ribbon bands only on stochastic options", () => {
    const view = buildForecastView(loadReport("with_partner_28.json"));
    for (const option of view.options) {
      if (option.kind === "single_open") {
        expect(option.p10).not.toBeNull();
        expect(option.p90).not.toBeNull();
      } else {
        expect(option.p10).toBeNull();
      }
    }
  });
});
