/**
 * Side-by-side comparison of loaded forecasts.
 *
 * The globally best scenario comes from the service's /api/v1/compare
 * ranking; the client only re-derives the same ordering for display and
 * verification (best option value descending, ties by input order).
 */

import type { OptionKind } from "./types.js";
import type { ForecastView } from "./views.js";

export interface ComparisonColumn {
  index: number;
  label: string;
  bestOption: OptionKind;
  bestValue: number;
  optionValues: Partial<Record<OptionKind, number>>;
}

export interface ComparisonModel {
  columns: ComparisonColumn[];
  /** scenario indices, best first */
  ranking: number[];
  highlighted: number;
  commonGridLength: number;
  horizonMismatch: boolean;
}

export function bestOptionValue(view: ForecastView): number {
  return Math.max(...view.options.map((o) => o.value));
}

/** Ranking the service applies: best option value descending, stable ties. */
export function deriveRanking(views: ForecastView[]): number[] {
  return views
    .map((view, index) => ({ index, value: bestOptionValue(view) }))
    .sort((a, b) => (b.value - a.value) || (a.index - b.index))
    .map((entry) => entry.index);
}

export function buildComparison(
  views: ForecastView[],
  labels?: string[],
  serviceRanking?: number[]
): ComparisonModel {
  if (views.length < 2) {
    throw new Error("comparison requires at least 2 loaded forecasts");
  }
  if (views.length > 4) {
    throw new Error("comparison supports at most 4 forecasts");
  }
  const gridLengths = views.map((v) => v.gridMonths.length);
  const commonGridLength = Math.min(...gridLengths);
  const ranking = serviceRanking ?? deriveRanking(views);
  const columns = views.map((view, index) => {
    const best = view.options.reduce((a, b) => (b.value > a.value ? b : a));
    const optionValues: Partial<Record<OptionKind, number>> = {};
    for (const option of view.options) optionValues[option.kind] = option.value;
    return {
      index,
      label: labels?.[index] ?? `scenario ${index + 1}`,
      bestOption: best.kind,
      bestValue: best.value,
      optionValues,
    };
  });
  return {
    columns,
    ranking,
    highlighted: ranking[0],
    commonGridLength,
    horizonMismatch: new Set(gridLengths).size > 1,
  };
}

/** Best-option curves truncated to the common grid prefix for overlay. */
export function overlayCurves(views: ForecastView[], model: ComparisonModel) {
  return views.map((view, index) => {
    const best = view.options.reduce((a, b) => (b.value > a.value ? b : a));
    return {
      index,
      kind: best.kind,
      grid: view.gridMonths.slice(0, model.commonGridLength),
      mean: best.mean.slice(0, model.commonGridLength),
    };
  });
}
