import { describe, expect, it } from "vitest";
import {
  bandPath, fmt, fmtTick, linearScale, niceTicks, polylinePath,
} from "../src/svg.js";

describe("linearScale", () => {
  it("maps domain endpoints to range endpoints", () => {
    const s = linearScale([0, 10], [100, 200]);
    expect(s(0)).toBe(100);
    expect(s(10)).toBe(200);
    expect(s(5)).toBe(150);
  });

  it("handles inverted ranges (screen y)", () => {
    const s = linearScale([0, 1], [300, 40]);
    expect(s(0)).toBe(300);
    expect(s(1)).toBe(40);
  });

  it("does not divide by zero on a degenerate domain", () => {
    const s = linearScale([2, 2], [0, 100]);
    expect(Number.isFinite(s(2))).toBe(true);
  });
});

describe("niceTicks", () => {
  it("produces round steps covering the domain", () => {
    expect(niceTicks(0, 100, 5)).toEqual([0, 20, 40, 60, 80, 100]);
    expect(niceTicks(1, 10000, 5)).toEqual([2000, 4000, 6000, 8000, 10000]);
  });

  it("handles negative domains", () => {
    const ticks = niceTicks(-1.3, 0.4, 5);
    expect(ticks[0]).toBeLessThanOrEqual(-1);
    expect(ticks[ticks.length - 1]).toBeLessThanOrEqual(0.4);
    for (let i = 1; i < ticks.length; i++) {
      expect(ticks[i]).toBeGreaterThan(ticks[i - 1]);
    }
  });

  it("degenerates gracefully", () => {
    expect(niceTicks(3, 3)).toEqual([3]);
  });
});

describe("formatting", () => {
  it("fmt rounds to two decimals and kills negative zero", () => {
    expect(fmt(1.23456)).toBe("1.23");
    expect(fmt(-0.0001)).toBe("0");
    expect(fmt(5)).toBe("5");
  });

  it("fmtTick keeps four significant digits", () => {
    expect(fmtTick(0.123456)).toBe("0.1235");
    expect(fmtTick(2000)).toBe("2000");
  });
});

describe("paths", () => {
  it("polyline emits M then L commands", () => {
    expect(polylinePath([0, 1, 2], [5, 6, 7])).toBe("M0,5L1,6L2,7");
  });

  it("band closes through the reversed lower curve", () => {
    const d = bandPath([0, 1], [1, 1], [3, 3]);
    expect(d).toBe("M0,1L1,1L1,3L0,3Z");
  });
});
