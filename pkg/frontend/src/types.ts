/**
 * Wire types for the forecast service (/api/v1).
 *
 * These mirror the JSON the service emits and accepts; the UI never computes
 * model values itself, it only displays what the API returns (plus
 * display-side sums used for verification).
 */

export interface WindowPayload {
  centers: number[];
  halfwidths: number[];
  importances?: number[];
  drift_rate?: number;
}

export interface GoalPayload {
  weight: number;
  sustainability: number;
}

export interface UserPayload {
  traits: number[];
  window: WindowPayload;
  extroversion: number;
  goals: GoalPayload[];
  tau_single: number;
  amplitudes?: number[];
  sensitivity?: number | number[];
  open_to_dating?: boolean;
}

export interface RelationshipPayload {
  partner_traits: number[];
  partner_window: WindowPayload;
  amplitudes?: number[];
  sensitivity?: number | number[];
  status?: "current" | "past";
}

export interface PopulationPayload {
  type: "parametric" | "csv";
  n?: number;
  mean?: number[];
  cov?: number[][];
  path?: string;
  own_window_halfwidths?: { dist: string; value?: number; low?: number; high?: number };
  demographics?: Record<string, string | number | boolean>;
}

export interface GroupPayload {
  id: string;
  base_encounter_rate: number;
  established?: boolean;
  ramp_tau_months?: number;
  mean_drift?: number[];
  demographic_filters?: Record<string, unknown>;
  population: PopulationPayload;
}

export interface BandPayload {
  name: string;
  lower: number;
  upper: number;
  ideal?: boolean;
}

export interface ScenarioPayload {
  schema_version: number;
  seed: number;
  horizon_years: number;
  grid_step_months?: number;
  mc?: { suitors?: number; realizations?: number };
  user: UserPayload;
  relationship?: RelationshipPayload | null;
  groups: GroupPayload[];
  bands?: BandPayload[];
  significance?: { min_samples?: number; widen_factor?: number; max_widenings?: number };
  scores?: { social_reference_volume?: number };
}

export type OptionKind = "stay_in_relationship" | "single_closed" | "single_open";

export interface OptionPayload {
  kind: OptionKind;
  value: number;
  mean: number[];
  p10: number[] | null;
  p90: number[] | null;
}

export interface ReportPayload {
  schema_version: number;
  seed: number;
  grid_months: number[];
  cumulative: {
    total: number[];
    by_group: Record<string, number[]>;
    by_quality: Record<string, number[]>;
    hazard_by_group: Record<string, number[]>;
    hazard_by_quality: Record<string, number[]>;
  };
  options: OptionPayload[];
  recommendation: { option: OptionKind; margin: number; note: string };
  scores: {
    selectivity: number;
    social_growth: number;
    opportunity_1y: number;
    opportunity_5y: number;
    opportunity_10y: number;
    partner_quality_percentile: number | null;
  };
  penalty: { suitor_mean: number; suitor_std: number; partner: number | null };
  relaxation_logs: Record<string, { step: number; action: string; count: number }[]>;
}

export interface ApiErrorPayload {
  code: "invalid_scenario" | "insufficient_data" | "internal";
  message: string;
  field_path: string | null;
  relaxation_log?: { step: number; action: string; count: number }[];
}

export interface ComparePayload {
  reports: ReportPayload[];
  ranking: number[];
}
