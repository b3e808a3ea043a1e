/** Axis scales and tick placement. */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
  ticks: number[];
}

function mkScale(
  domain: [number, number],
  range: [number, number],
  fwd: (v: number) => number,
  ticks: number[],
): Scale {
  const [d0, d1] = [fwd(domain[0]), fwd(domain[1])];
  const span = d1 - d0 || 1;
  const f = (v: number) =>
    range[0] + ((fwd(v) - d0) / span) * (range[1] - range[0]);
  return Object.assign(f, { domain, range, ticks });
}

/** Round-numbered ticks covering [lo, hi], classic 1-2-5 progression. */
export function niceTicks(lo: number, hi: number, want = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(want - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

/** Powers of ten inside [lo, hi]; falls back to endpoints for thin spans. */
export function logTicks(lo: number, hi: number): number[] {
  if (!(lo > 0) || !(hi > lo)) return [lo];
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    const t = Math.pow(10, e);
    if (t >= lo * (1 - 1e-9)) out.push(t);
  }
  if (out.length < 2) return [lo, hi];
  return out;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  return mkScale(domain, range, (v) => v, niceTicks(domain[0], domain[1]));
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  if (!(domain[0] > 0)) {
    throw new Error(`log scale needs a positive domain, got ${domain[0]}`);
  }
  return mkScale(domain, range, Math.log10, logTicks(domain[0], domain[1]));
}

/** Compact tick label: trims float noise, keeps small magnitudes readable. */
export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 10000 || a < 0.001) return v.toExponential(0);
  const s = v.toPrecision(4);
  return String(Number(s));
}

/** Pad a [min, max] extent by a small fraction so points avoid the frame. */
export function padExtent(lo: number, hi: number, frac = 0.05): [number, number] {
  if (!(hi > lo)) return [lo - 0.5, hi + 0.5];
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) throw new Error("extent of empty data");
  return [lo, hi];
}
