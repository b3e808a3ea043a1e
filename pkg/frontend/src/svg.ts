/**
 * String-level SVG assembly. Nothing here knows about data; charts compose
 * these helpers into complete documents.
 */

import { Scale, fmtTick } from "./scale.js";

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export interface Frame {
  width: number;
  height: number;
  margins: Margins;
  /** plot-area pixel ranges */
  x: [number, number];
  y: [number, number];
}

export function makeFrame(width: number, height: number, margins: Margins): Frame {
  return {
    width,
    height,
    margins,
    x: [margins.left, width - margins.right],
    y: [height - margins.bottom, margins.top], // y grows upward
  };
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(tag: string, attrs: Record<string, string | number>, body = ""): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? round2(v) : esc(v)}"`)
    .join(" ");
  return body === "" ? `<${tag} ${a}/>` : `<${tag} ${a}>${body}</${tag}>`;
}

function round2(v: number): string {
  return String(Math.round(v * 100) / 100);
}

export function text(
  x: number,
  y: number,
  s: string,
  opts: { anchor?: string; size?: number; rotate?: number; fill?: string } = {},
): string {
  const attrs: Record<string, string | number> = {
    x,
    y,
    "text-anchor": opts.anchor ?? "middle",
    "font-size": opts.size ?? 12,
    "font-family": "sans-serif",
    fill: opts.fill ?? "#222",
  };
  if (opts.rotate !== undefined) {
    attrs.transform = `rotate(${opts.rotate} ${round2(x)} ${round2(y)})`;
  }
  return el("text", attrs, esc(s));
}

export function polyline(
  pts: Array<[number, number]>,
  color: string,
  width = 1.5,
  dash?: string,
): string {
  const attrs: Record<string, string | number> = {
    points: pts.map(([x, y]) => `${round2(x)},${round2(y)}`).join(" "),
    fill: "none",
    stroke: color,
    "stroke-width": width,
  };
  if (dash) attrs["stroke-dasharray"] = dash;
  return el("polyline", attrs);
}

export function circle(x: number, y: number, r: number, color: string): string {
  return el("circle", { cx: x, cy: y, r, fill: color });
}

export function rect(
  x: number,
  y: number,
  w: number,
  h: number,
  fill: string,
  stroke = "none",
): string {
  return el("rect", { x, y, width: w, height: h, fill, stroke });
}

/** Axes, grid lines, tick labels and axis titles for a framed plot. */
export function axes(
  frame: Frame,
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string,
): string {
  const parts: string[] = [];
  const [x0, x1] = frame.x;
  const [y0, y1] = frame.y; // y0 is the bottom
  for (const t of xs.ticks) {
    const px = xs(t);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    parts.push(el("line", { x1: px, y1: y0, x2: px, y2: y1, stroke: "#ddd" }));
    parts.push(el("line", { x1: px, y1: y0, x2: px, y2: y0 + 4, stroke: "#222" }));
    parts.push(text(px, y0 + 17, fmtTick(t), { size: 11 }));
  }
  for (const t of ys.ticks) {
    const py = ys(t);
    if (py > y0 + 0.5 || py < y1 - 0.5) continue;
    parts.push(el("line", { x1: x0, y1: py, x2: x1, y2: py, stroke: "#ddd" }));
    parts.push(el("line", { x1: x0 - 4, y1: py, x2: x0, y2: py, stroke: "#222" }));
    parts.push(text(x0 - 7, py + 4, fmtTick(t), { anchor: "end", size: 11 }));
  }
  parts.push(
    el("rect", {
      x: x0,
      y: y1,
      width: x1 - x0,
      height: y0 - y1,
      fill: "none",
      stroke: "#222",
    }),
  );
  parts.push(text((x0 + x1) / 2, frame.height - 8, xLabel));
  parts.push(text(14, (y0 + y1) / 2, yLabel, { rotate: -90 }));
  return parts.join("\n");
}

export const PALETTE = [
  "#4363d8",
  "#e6194b",
  "#3cb44b",
  "#f58231",
  "#911eb4",
  "#46949f",
  "#808000",
  "#000075",
  "#9a6324",
  "#f032e6",
];

export function legend(
  frame: Frame,
  entries: Array<{ label: string; color: string }>,
): string {
  const x = frame.x[1] + 12;
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const y = frame.y[1] + 10 + i * 18;
    parts.push(el("line", { x1: x, y1: y, x2: x + 18, y2: y, stroke: e.color, "stroke-width": 2.5 }));
    parts.push(text(x + 24, y + 4, e.label, { anchor: "start", size: 11 }));
  });
  return parts.join("\n");
}

export function document(frame: Frame, title: string, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`,
    rect(0, 0, frame.width, frame.height, "#ffffff"),
    text(frame.width / 2, 22, title, { size: 15 }),
    body,
    "</svg>",
  ].join("\n");
}
