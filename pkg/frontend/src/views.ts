/**
 * Report payload -> chart-ready view model.
 *
 * Stacked series are cumulative offsets for area rendering; the only math
 * here is the display-side summation, which doubles as a verification that
 * the stacked attributions reproduce the API's total curve.
 */

import type { OptionKind, OptionPayload, ReportPayload } from "./types.js";

export const STACK_SUM_TOLERANCE = 1e-6;

export interface StackedSeries {
  key: string;
  /** cumulative lower/upper bounds per grid point, for area rendering */
  lower: number[];
  upper: number[];
  values: number[];
}

export interface RibbonSeries {
  kind: OptionKind;
  value: number;
  mean: number[];
  p10: number[] | null;
  p90: number[] | null;
}

export interface StackCheck {
  passed: boolean;
  maxError: number;
}

export interface ForecastView {
  report: ReportPayload;
  gridMonths: number[];
  byQuality: StackedSeries[];
  byGroup: StackedSeries[];
  options: RibbonSeries[];
  badge: { option: OptionKind; margin: number; note: string };
  qualityStackCheck: StackCheck;
  groupStackCheck: StackCheck;
}

export function stackSeries(parts: Record<string, number[]>, order?: string[]): StackedSeries[] {
  const keys = order ?? Object.keys(parts);
  const length = keys.length ? parts[keys[0]].length : 0;
  const offset = new Array<number>(length).fill(0);
  const stacked: StackedSeries[] = [];
  for (const key of keys) {
    const values = parts[key];
    const lower = offset.slice();
    const upper = lower.map((v, i) => v + values[i]);
    stacked.push({ key, lower, upper, values: values.slice() });
    for (let i = 0; i < length; i += 1) offset[i] = upper[i];
  }
  return stacked;
}

/** Compare the top of the stack against the API's total curve. */
export function checkStackAgainstTotal(
  stacked: StackedSeries[],
  total: number[],
  tolerance: number = STACK_SUM_TOLERANCE
): StackCheck {
  if (!stacked.length) {
    const max = total.reduce((m, v) => Math.max(m, Math.abs(v)), 0);
    return { passed: max <= tolerance, maxError: max };
  }
  const top = stacked[stacked.length - 1].upper;
  let maxError = 0;
  for (let i = 0; i < total.length; i += 1) {
    maxError = Math.max(maxError, Math.abs(top[i] - total[i]));
  }
  return { passed: maxError <= tolerance, maxError };
}

function toRibbon(option: OptionPayload): RibbonSeries {
  return {
    kind: option.kind,
    value: option.value,
    mean: option.mean,
    p10: option.p10,
    p90: option.p90,
  };
}

/** Build the full view model from a report payload (no model math). */
export function buildForecastView(report: ReportPayload): ForecastView {
  const byQuality = stackSeries(report.cumulative.by_quality);
  const byGroup = stackSeries(report.cumulative.by_group);
  const view: ForecastView = {
    report,
    gridMonths: report.grid_months,
    byQuality,
    byGroup,
    options: report.options.map(toRibbon),
    badge: {
      option: report.recommendation.option,
      margin: report.recommendation.margin,
      note: report.recommendation.note,
    },
    qualityStackCheck: checkStackAgainstTotal(byQuality, report.cumulative.total),
    groupStackCheck: checkStackAgainstTotal(byGroup, report.cumulative.total),
  };
  return view;
}

/** Every chart series must run the full grid length. */
export function seriesLengthsConsistent(view: ForecastView): boolean {
  const n = view.gridMonths.length;
  const stacks = [...view.byQuality, ...view.byGroup];
  if (stacks.some((s) => s.values.length !== n || s.upper.length !== n)) return false;
  return view.options.every(
    (o) =>
      o.mean.length === n &&
      (o.p10 === null || o.p10.length === n) &&
      (o.p90 === null || o.p90.length === n)
  );
}
