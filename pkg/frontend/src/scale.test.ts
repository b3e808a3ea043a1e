import { describe, expect, it } from "vitest";

import { extent, fmtTick, linearScale, logScale, niceTicks, padExtent } from "./scale.js";

describe("linearScale", () => {
  it("maps domain endpoints to range endpoints", () => {
    const s = linearScale([0, 10], [100, 300]);
    expect(s(0)).toBe(100);
    expect(s(10)).toBe(300);
    expect(s(5)).toBe(200);
  });

  it("supports inverted ranges (SVG y axis)", () => {
    const s = linearScale([0, 1], [400, 40]);
    expect(s(0)).toBe(400);
    expect(s(1)).toBe(40);
    expect(s(0.5)).toBe(220);
  });

  it("tolerates a flat domain instead of dividing by zero", () => {
    const s = linearScale([2, 2], [0, 100]);
    expect(Number.isFinite(s(2))).toBe(true);
  });
});

describe("niceTicks", () => {
  it("uses 1-2-5 steps", () => {
    expect(niceTicks(0, 1, 5)).toEqual([0, 0.5, 1]);
    expect(niceTicks(0, 100, 6)).toEqual([0, 20, 40, 60, 80, 100]);
  });

  it("stays inside the requested extent", () => {
    const ticks = niceTicks(0.47, 9.3, 6);
    expect(ticks.length).toBeGreaterThanOrEqual(2);
    for (const t of ticks) {
      expect(t).toBeGreaterThanOrEqual(0.47 - 1e-9);
      expect(t).toBeLessThanOrEqual(9.3 + 1e-9);
    }
  });
});

describe("logScale", () => {
  it("is linear in log space", () => {
    const s = logScale([1, 100], [0, 200]);
    expect(s(1)).toBeCloseTo(0, 9);
    expect(s(10)).toBeCloseTo(100, 9);
    expect(s(100)).toBeCloseTo(200, 9);
  });

  it("ticks at powers of ten inside the domain", () => {
    const s = logScale([0.5, 2000], [0, 1]);
    expect(s.ticks).toEqual([1, 10, 100, 1000]);
  });

  it("rejects nonpositive domains", () => {
    expect(() => logScale([0, 10], [0, 1])).toThrow(/positive/);
    expect(() => logScale([-1, 10], [0, 1])).toThrow(/positive/);
  });
});

describe("fmtTick", () => {
  it("keeps friendly magnitudes plain", () => {
    expect(fmtTick(0.5)).toBe("0.5");
    expect(fmtTick(20)).toBe("20");
    expect(fmtTick(1)).toBe("1");
  });

  it("switches to exponent notation for extremes", () => {
    expect(fmtTick(100000)).toBe("1e+5");
    expect(fmtTick(0.0001)).toBe("1e-4");
  });
});

describe("extent / padExtent", () => {
  it("finds min and max", () => {
    expect(extent([3, 1, 2])).toEqual([1, 3]);
  });

  it("throws on empty input", () => {
    expect(() => extent([])).toThrow(/empty/);
  });

  it("pads both ends and widens a flat extent", () => {
    expect(padExtent(0, 10, 0.1)).toEqual([-1, 11]);
    const [lo, hi] = padExtent(5, 5, 0.1);
    expect(lo).toBeLessThan(5);
    expect(hi).toBeGreaterThan(5);
  });
});
