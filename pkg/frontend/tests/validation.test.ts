import { describe, expect, it } from "vitest";

import { validateScenarioForm, type ScenarioDraft } from "../src/validation";
import { loadScenario } from "./helpers";

function draftFrom(name: string): ScenarioDraft {
  return { name: "t", scenario: loadScenario(name), dirty: false };
}

describe("validateScenarioForm", () => {
  it("accepts every shipped fixture", () => {
    for (const name of ["with_partner_28.json", "single_51.json", "location_a.json"]) {
      const result = validateScenarioForm(draftFrom(name));
      expect(result.errors).toEqual([]);
      expect(result.valid).toBe(true);
    }
  });

  it("rejects fewer than four trait dimensions, citing the minimum", () => {
    const draft = draftFrom("location_a.json");
    draft.scenario.user.traits = [0.5, 0.5, 0.5];
    const result = validateScenarioForm(draft);
    expect(result.valid).toBe(false);
    const error = result.errors.find((e) => e.field === "user.traits");
    expect(error?.message).toContain("4");
  });

  it("flags the partner section when the relationship toggle is on but empty", () => {
    const draft = draftFrom("with_partner_28.json");
    draft.scenario.relationship = {
      partner_traits: [],
      partner_window: { centers: [], halfwidths: [] },
    };
    const result = validateScenarioForm(draft);
    expect(result.valid).toBe(false);
    expect(result.errors.some((e) => e.field.startsWith("relationship."))).toBe(true);
  });

  it("flags out-of-range traits with their index", () => {
    const draft = draftFrom("location_a.json");
    draft.scenario.user.traits = [0.5, 1.4, 0.5, 0.5];
    const result = validateScenarioForm(draft);
    expect(result.errors.some((e) => e.field === "user.traits[1]")).toBe(true);
  });

  it("never throws on an empty-ish draft", () => {
    const draft = {
      name: "x",
      dirty: false,
      scenario: { schema_version: 1, seed: 1, horizon_years: 0, user: {}, groups: [] },
    } as unknown as ScenarioDraft;
    const result = validateScenarioForm(draft);
    expect(result.valid).toBe(false);
    expect(result.errors.length).toBeGreaterThan(0);
  });
});
