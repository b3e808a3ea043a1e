/**
 * Chart builders. Each takes parsed CSV rows (from the simulator CLI's
 * output files) and returns a complete SVG document string.
 *
 * Input contracts, by chart kind:
 *   mean-response         results.csv from the sweep runner
 *   slowdown-cdf          grid_point,cdf_value
 *   conditional-slowdown  bin_mean_size,bin_mean_slowdown,count
 *   period-weights        period_index,weight
 *   heatmap               size_bin,pred_bin,size_low,size_high,pred_low,pred_high,count
 */

import { Row, requireColumns, num } from "./csv.js";
import { extent, linearScale, logScale, padExtent } from "./scale.js";
import {
  PALETTE,
  axes,
  circle,
  document as svgDocument,
  legend,
  makeFrame,
  polyline,
  rect,
  text,
} from "./svg.js";

export interface ChartOptions {
  title?: string;
  width?: number;
  height?: number;
}

export class ChartError extends Error {}

const LEGEND_WIDTH = 180;

function baseMargins(withLegend: boolean) {
  return { top: 36, right: withLegend ? LEGEND_WIDTH : 20, bottom: 44, left: 58 };
}

// --- mean response vs offered load -----------------------------------------

/** One curve per policy combination; predictor info shown when it matters. */
export function groupLabel(row: Row): string {
  let label = `${row.choice_policy}/${row.sched_policy}`;
  const predictor = row.predictor ?? "exact";
  if (predictor !== "exact") {
    label += ` (${predictor}`;
    if (predictor === "alpha" || predictor === "alpha_beta") {
      label += ` a=${row.alpha}`;
      if (predictor === "alpha_beta") label += ` b=${row.beta}`;
    }
    label += ")";
  }
  return label;
}

export function meanResponseChart(rows: Row[], opts: ChartOptions = {}): string {
  requireColumns(rows, ["arrival_rate", "choice_policy", "sched_policy", "mean_response"], "results");
  const groups = new Map<string, Array<[number, number]>>();
  for (const row of rows) {
    const label = groupLabel(row);
    let pts = groups.get(label);
    if (!pts) {
      pts = [];
      groups.set(label, pts);
    }
    pts.push([num(row, "arrival_rate"), num(row, "mean_response")]);
  }
  const allX: number[] = [];
  const allY: number[] = [];
  for (const pts of groups.values()) {
    pts.sort((a, b) => a[0] - b[0]);
    for (const [x, y] of pts) {
      allX.push(x);
      allY.push(y);
    }
  }

  const width = opts.width ?? 720;
  const height = opts.height ?? 440;
  const frame = makeFrame(width, height, baseMargins(true));
  const xs = linearScale(padExtent(...extent(allX), 0.03), frame.x);
  const ys = linearScale(padExtent(0, Math.max(...allY), 0.05), frame.y);

  const body: string[] = [axes(frame, xs, ys, "offered load per queue", "mean response time")];
  const entries: Array<{ label: string; color: string }> = [];
  let i = 0;
  for (const [label, pts] of groups) {
    const color = PALETTE[i % PALETTE.length];
    body.push(polyline(pts.map(([x, y]) => [xs(x), ys(y)]), color, 2));
    for (const [x, y] of pts) body.push(circle(xs(x), ys(y), 2.5, color));
    entries.push({ label, color });
    i += 1;
  }
  body.push(legend(frame, entries));
  return svgDocument(frame, opts.title ?? "Mean response time vs offered load", body.join("\n"));
}

// --- slowdown CDF -----------------------------------------------------------

export function slowdownCdfChart(rows: Row[], opts: ChartOptions = {}): string {
  requireColumns(rows, ["grid_point", "cdf_value"], "slowdown CDF");
  const pts = rows
    .map((r): [number, number] => [num(r, "grid_point"), num(r, "cdf_value")])
    .sort((a, b) => a[0] - b[0]);

  const width = opts.width ?? 620;
  const height = opts.height ?? 420;
  const frame = makeFrame(width, height, baseMargins(false));
  const xs = logScale(extent(pts.map((p) => p[0])), frame.x);
  const ys = linearScale([0, 1], frame.y);

  const body = [
    axes(frame, xs, ys, "slowdown", "fraction of jobs"),
    polyline(pts.map(([x, y]) => [xs(x), ys(y)]), PALETTE[0], 2),
  ];
  return svgDocument(frame, opts.title ?? "Slowdown distribution", body.join("\n"));
}

// --- mean slowdown conditioned on job size ----------------------------------

export function conditionalSlowdownChart(rows: Row[], opts: ChartOptions = {}): string {
  requireColumns(rows, ["bin_mean_size", "bin_mean_slowdown", "count"], "conditional slowdown");
  const pts: Array<[number, number, number]> = rows
    .filter((r) => num(r, "count") > 0)
    .map((r): [number, number, number] => [
      num(r, "bin_mean_size"),
      num(r, "bin_mean_slowdown"),
      num(r, "count"),
    ])
    .sort((a, b) => a[0] - b[0]);
  if (pts.length === 0) throw new ChartError("no populated size bins");

  const width = opts.width ?? 620;
  const height = opts.height ?? 420;
  const frame = makeFrame(width, height, baseMargins(false));
  const xs = logScale(extent(pts.map((p) => p[0])), frame.x);
  const ys = linearScale(padExtent(1, Math.max(...pts.map((p) => p[1])), 0.05), frame.y);

  const maxCount = Math.max(...pts.map((p) => p[2]));
  const body = [
    axes(frame, xs, ys, "job size (binned)", "mean slowdown"),
    polyline(pts.map(([x, y]) => [xs(x), ys(y)]), PALETTE[0], 1.5),
  ];
  // marker area tracks bin population so sparse tails read as tentative
  for (const [x, y, c] of pts) {
    body.push(circle(xs(x), ys(y), 1.5 + 3 * Math.sqrt(c / maxCount), PALETTE[0]));
  }
  return svgDocument(frame, opts.title ?? "Mean slowdown by job size", body.join("\n"));
}

// --- per-period arrival weights ----------------------------------------------

export function periodWeightsChart(rows: Row[], opts: ChartOptions = {}): string {
  requireColumns(rows, ["period_index", "weight"], "period weights");
  const pts = rows
    .map((r): [number, number] => [num(r, "period_index"), num(r, "weight")])
    .sort((a, b) => a[0] - b[0]);

  const width = opts.width ?? 680;
  const height = opts.height ?? 380;
  const frame = makeFrame(width, height, baseMargins(false));
  const xs = linearScale([-0.5, pts.length - 0.5], frame.x);
  const ys = linearScale([0, Math.max(...pts.map((p) => p[1]), 1) * 1.05], frame.y);

  const body = [axes(frame, xs, ys, "period", "relative arrival weight")];
  const barW = Math.max(1, ((frame.x[1] - frame.x[0]) / pts.length) * 0.85);
  const y0 = ys(0);
  for (const [i, w] of pts) {
    body.push(rect(xs(i) - barW / 2, ys(w), barW, y0 - ys(w), "#4363d8"));
  }
  // reference line at the uniform weight
  body.push(
    polyline(
      [
        [frame.x[0], ys(1)],
        [frame.x[1], ys(1)],
      ],
      "#e6194b",
      1,
      "4 3",
    ),
  );
  return svgDocument(frame, opts.title ?? "Arrival weight by period", body.join("\n"));
}

// --- size vs prediction heatmap ----------------------------------------------

export function heatmapChart(rows: Row[], opts: ChartOptions = {}): string {
  requireColumns(rows, ["size_bin", "pred_bin", "count"], "heatmap");
  let underflow = 0;
  const cells: Array<{ i: number; j: number; c: number }> = [];
  for (const r of rows) {
    const i = num(r, "size_bin");
    const j = num(r, "pred_bin");
    const c = num(r, "count");
    if (i < 0 || j < 0) {
      underflow += c;
      continue;
    }
    cells.push({ i, j, c });
  }
  if (cells.length === 0) throw new ChartError("no heatmap cells");
  const nI = Math.max(...cells.map((c) => c.i)) + 1;
  const nJ = Math.max(...cells.map((c) => c.j)) + 1;
  const maxC = Math.max(...cells.map((c) => c.c));

  const width = opts.width ?? 560;
  const height = opts.height ?? 560;
  const margins = { top: 36, right: 24, bottom: 56, left: 58 };
  const frame = makeFrame(width, height, margins);
  const xs = linearScale([0, nI], frame.x);
  const ys = linearScale([0, nJ], frame.y);
  const cw = xs(1) - xs(0);
  const ch = ys(0) - ys(1);

  const body: string[] = [];
  for (const { i, j, c } of cells) {
    // log shading: a single huge diagonal should not wash out everything else
    const s = Math.log1p(c) / Math.log1p(maxC);
    body.push(rect(xs(i), ys(j + 1), cw, ch, shade(s)));
  }
  body.push(
    rect(frame.x[0], frame.y[1], frame.x[1] - frame.x[0], frame.y[0] - frame.y[1], "none", "#222"),
  );
  body.push(text((frame.x[0] + frame.x[1]) / 2, height - 24, "size quantile bin"));
  body.push(text(14, (frame.y[0] + frame.y[1]) / 2, "prediction bin", { rotate: -90 }));
  if (underflow > 0) {
    body.push(
      text((frame.x[0] + frame.x[1]) / 2, height - 8, `${underflow} below-range predictions`, {
        size: 10,
        fill: "#666",
      }),
    );
  }
  return svgDocument(frame, opts.title ?? "Job size vs prediction", body.join("\n"));
}

function shade(s: number): string {
  // white -> dark blue
  const r = Math.round(255 - 215 * s);
  const g = Math.round(255 - 190 * s);
  const b = Math.round(255 - 115 * s);
  return `rgb(${r},${g},${b})`;
}

// --- dispatch ----------------------------------------------------------------

export const CHART_KINDS: Record<string, (rows: Row[], opts: ChartOptions) => string> = {
  "mean-response": meanResponseChart,
  "slowdown-cdf": slowdownCdfChart,
  "conditional-slowdown": conditionalSlowdownChart,
  "period-weights": periodWeightsChart,
  heatmap: heatmapChart,
};
