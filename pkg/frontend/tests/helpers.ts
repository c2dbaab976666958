import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { ComparePayload, ReportPayload, ScenarioPayload } from "../src/types";
import type { DraftStore } from "../src/storage";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadReport(name: string): ReportPayload {
  return JSON.parse(readFileSync(join(FIXTURES, `report_${name}`), "utf-8")) as ReportPayload;
}

export function loadScenario(name: string): ScenarioPayload {
  return JSON.parse(readFileSync(join(FIXTURES, `scenario_${name}`), "utf-8")) as ScenarioPayload;
}

export function loadCompare(): ComparePayload {
  return JSON.parse(
    readFileSync(join(FIXTURES, "compare_locations.json"), "utf-8")
  ) as ComparePayload;
}

export const REPORT_FIXTURES = [
  "with_partner_28.json",
  "single_51.json",
  "location_a.json",
  "location_b.json",
] as const;

/** In-memory stand-in for window.localStorage. */
export class MemoryStore implements DraftStore {
  private map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}
