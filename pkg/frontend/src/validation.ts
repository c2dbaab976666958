/**
 * Scenario form drafts and field-level validation.
 *
 * Validation mirrors the service's schema closely enough to catch mistakes
 * before a request is made (trait ranges, the 4-dimension minimum, partner
 * completeness); the service stays the source of truth.
 */

import type { ScenarioPayload } from "./types.js";

export const MIN_TRAIT_DIM = 4;

export interface FieldError {
  field: string;
  message: string;
}

export interface ValidityResult {
  valid: boolean;
  errors: FieldError[];
}

export interface ScenarioDraft {
  name: string;
  scenario: ScenarioPayload;
  dirty: boolean;
}

function pushRangeErrors(
  errors: FieldError[],
  values: number[] | undefined,
  field: string,
  lo: number,
  hi: number
): void {
  (values ?? []).forEach((v, i) => {
    if (!Number.isFinite(v) || v < lo || v > hi) {
      errors.push({ field: `${field}[${i}]`, message: `value ${v} outside [${lo}, ${hi}]` });
    }
  });
}

/** Field-level validity of a scenario draft; never throws. */
export function validateScenarioForm(draft: ScenarioDraft): ValidityResult {
  const errors: FieldError[] = [];
  const scenario = draft.scenario;
  const user = scenario.user;

  const dim = user?.traits?.length ?? 0;
  if (dim < MIN_TRAIT_DIM) {
    errors.push({
      field: "user.traits",
      message: `at least ${MIN_TRAIT_DIM} trait dimensions are required, got ${dim}`,
    });
  }
  pushRangeErrors(errors, user?.traits, "user.traits", 0, 1);
  pushRangeErrors(errors, user?.window?.centers, "user.window.centers", 0, 1);

  if (user?.window) {
    if (user.window.centers?.length !== dim) {
      errors.push({ field: "user.window.centers", message: `expected ${dim} values` });
    }
    if (user.window.halfwidths?.length !== dim) {
      errors.push({ field: "user.window.halfwidths", message: `expected ${dim} values` });
    }
    (user.window.halfwidths ?? []).forEach((h, i) => {
      if (!Number.isFinite(h) || h < 0) {
        errors.push({ field: `user.window.halfwidths[${i}]`, message: "must be >= 0" });
      }
    });
  } else {
    errors.push({ field: "user.window", message: "compatibility window is required" });
  }

  if (!Number.isFinite(user?.extroversion) || user.extroversion < 0 || user.extroversion > 1) {
    errors.push({ field: "user.extroversion", message: "must lie in [0, 1]" });
  }
  if (!user?.goals?.length) {
    errors.push({ field: "user.goals", message: "at least one life goal is required" });
  }
  if (!(user?.tau_single > 0)) {
    errors.push({ field: "user.tau_single", message: "must be > 0" });
  }

  if (scenario.relationship != null) {
    const rel = scenario.relationship;
    if (!rel.partner_traits?.length) {
      errors.push({ field: "relationship.partner_traits", message: "partner traits are required" });
    } else if (rel.partner_traits.length !== dim) {
      errors.push({ field: "relationship.partner_traits", message: `expected ${dim} values` });
    }
    pushRangeErrors(errors, rel.partner_traits, "relationship.partner_traits", 0, 1);
    if (!rel.partner_window?.centers?.length || !rel.partner_window?.halfwidths?.length) {
      errors.push({ field: "relationship.partner_window", message: "partner window is required" });
    }
  }

  if (!scenario.groups?.length) {
    errors.push({ field: "groups", message: "at least one group is required" });
  }
  (scenario.groups ?? []).forEach((group, i) => {
    if (!group.id) {
      errors.push({ field: `groups[${i}].id`, message: "group id is required" });
    }
    if (!(group.base_encounter_rate >= 0)) {
      errors.push({ field: `groups[${i}].base_encounter_rate`, message: "must be >= 0" });
    }
  });

  if (!(scenario.horizon_years > 0)) {
    errors.push({ field: "horizon_years", message: "must be > 0" });
  }
  if (!Number.isInteger(scenario.seed)) {
    errors.push({ field: "seed", message: "seed must be an integer" });
  }

  return { valid: errors.length === 0, errors };
}
