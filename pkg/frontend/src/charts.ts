/**
 * Minimal SVG chart rendering: stacked areas for probabilities, lines with
 * percentile ribbons for utilities. Pure string output, no dependencies.
 */

import type { StackedSeries, RibbonSeries } from "./views.js";

export interface ChartGeometry {
  width: number;
  height: number;
  padLeft: number;
  padRight: number;
  padTop: number;
  padBottom: number;
}

const DEFAULT_GEOMETRY: ChartGeometry = {
  width: 640,
  height: 280,
  padLeft: 48,
  padRight: 12,
  padTop: 12,
  padBottom: 30,
};

const PALETTE = ["#7c5cff", "#2bb3a3", "#e8897a", "#5c8fd6", "#caa53d", "#a05cb5"];

function scaleFactory(grid: number[], yMax: number, g: ChartGeometry) {
  const xSpan = Math.max(grid[grid.length - 1] - grid[0], 1e-9);
  const x = (t: number) =>
    g.padLeft + ((t - grid[0]) / xSpan) * (g.width - g.padLeft - g.padRight);
  const y = (v: number) =>
    g.height - g.padBottom - (v / yMax) * (g.height - g.padTop - g.padBottom);
  return { x, y };
}

function axes(grid: number[], yMax: number, g: ChartGeometry, yLabel: string): string {
  const { x, y } = scaleFactory(grid, yMax, g);
  const ticksY = 4;
  const parts: string[] = [];
  for (let i = 0; i <= ticksY; i += 1) {
    const v = (yMax * i) / ticksY;
    parts.push(
      `<line x1="${g.padLeft}" y1="${y(v)}" x2="${g.width - g.padRight}" y2="${y(v)}" stroke="#e4e1ef" stroke-width="1"/>`,
      `<text x="${g.padLeft - 6}" y="${y(v) + 4}" text-anchor="end" font-size="10" fill="#666">${v.toFixed(2)}</text>`
    );
  }
  const months = grid[grid.length - 1];
  const stepYears = months > 48 ? 24 : 12;
  for (let t = grid[0]; t <= months + 1e-9; t += stepYears) {
    parts.push(
      `<text x="${x(t)}" y="${g.height - g.padBottom + 16}" text-anchor="middle" font-size="10" fill="#666">${(t / 12).toFixed(0)}y</text>`
    );
  }
  parts.push(
    `<text x="${g.padLeft}" y="${g.padTop - 2}" font-size="10" fill="#444">${yLabel}</text>`
  );
  return parts.join("");
}

function pathFrom(points: Array<[number, number]>): string {
  return points
    .map(([px, py], i) => `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`)
    .join("");
}

/** Stacked area chart (probability attribution over time). */
export function renderStackedArea(
  grid: number[],
  stacked: StackedSeries[],
  yLabel: string,
  geometry: Partial<ChartGeometry> = {}
): string {
  const g = { ...DEFAULT_GEOMETRY, ...geometry };
  const yMax = Math.max(
    1e-9,
    ...stacked.map((s) => Math.max(...s.upper)),
    0.0
  );
  const { x, y } = scaleFactory(grid, Math.min(Math.max(yMax, 0.05), 1.0), g);
  const layers = stacked
    .map((series, idx) => {
      const forward: Array<[number, number]> = grid.map((t, i) => [x(t), y(series.upper[i])]);
      const backward: Array<[number, number]> = grid
        .map((t, i): [number, number] => [x(t), y(series.lower[i])])
        .reverse();
      const d = `${pathFrom(forward)}${pathFrom(backward).replace(/^M/, "L")}Z`;
      const color = PALETTE[idx % PALETTE.length];
      return `<path d="${d}" fill="${color}" fill-opacity="0.55" stroke="${color}" stroke-width="1" data-series="${series.key}"/>`;
    })
    .join("");
  const legend = stacked
    .map((series, idx) => {
      const color = PALETTE[idx % PALETTE.length];
      return `<tspan fill="${color}">&#9632; ${series.key}</tspan>`;
    })
    .join("  ");
  return (
    `<svg viewBox="0 0 ${g.width} ${g.height}" xmlns="http://www.w3.org/2000/svg" role="img">` +
    axes(grid, Math.min(Math.max(yMax, 0.05), 1.0), g, yLabel) +
    layers +
    `<text x="${g.width - g.padRight}" y="${g.padTop - 2}" text-anchor="end" font-size="10">${legend}</text>` +
    `</svg>`
  );
}

/** Option utility curves with p10/p90 ribbons where present. */
export function renderRibbonLines(
  grid: number[],
  options: RibbonSeries[],
  yLabel: string,
  geometry: Partial<ChartGeometry> = {}
): string {
  const g = { ...DEFAULT_GEOMETRY, ...geometry };
  let yMax = 1e-9;
  for (const option of options) {
    yMax = Math.max(yMax, ...option.mean, ...(option.p90 ?? []));
  }
  const { x, y } = scaleFactory(grid, yMax * 1.05, g);
  const parts: string[] = [];
  options.forEach((option, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    if (option.p10 && option.p90) {
      const forward: Array<[number, number]> = grid.map((t, i) => [x(t), y(option.p90![i])]);
      const backward: Array<[number, number]> = grid
        .map((t, i): [number, number] => [x(t), y(option.p10![i])])
        .reverse();
      parts.push(
        `<path d="${pathFrom(forward)}${pathFrom(backward).replace(/^M/, "L")}Z" fill="${color}" fill-opacity="0.18" stroke="none" data-ribbon="${option.kind}"/>`
      );
    }
    const line = grid.map((t, i): [number, number] => [x(t), y(option.mean[i])]);
    parts.push(
      `<path d="${pathFrom(line)}" fill="none" stroke="${color}" stroke-width="2" data-line="${option.kind}"/>`
    );
  });
  const legend = options
    .map((option, idx) => {
      const color = PALETTE[idx % PALETTE.length];
      return `<tspan fill="${color}">&#9644; ${option.kind} (V=${option.value.toFixed(3)})</tspan>`;
    })
    .join("  ");
  return (
    `<svg viewBox="0 0 ${g.width} ${g.height}" xmlns="http://www.w3.org/2000/svg" role="img">` +
    axes(grid, yMax * 1.05, g, yLabel) +
    parts.join("") +
    `<text x="${g.width - g.padRight}" y="${g.padTop - 2}" text-anchor="end" font-size="10">${legend}</text>` +
    `</svg>`
  );
}
