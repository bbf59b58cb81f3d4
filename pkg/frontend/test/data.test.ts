import { fileURLToPath } from "node:url";
import { join, dirname } from "node:path";
import { describe, expect, it } from "vitest";
import {
  column, gapColumns, parseMetricCsv, readMetricCsv, readSummary,
} from "../src/data.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

describe("parseMetricCsv", () => {
  it("parses header and numeric rows", () => {
    const table = parseMetricCsv(
      "t,reward_gap_1,normalized_reward,occupied_1\n1,0.5,0.25,2.0\n2,0.4,0.3,1.0\n",
    );
    expect(table.header).toEqual([
      "t", "reward_gap_1", "normalized_reward", "occupied_1",
    ]);
    expect(column(table, "reward_gap_1")).toEqual([0.5, 0.4]);
    expect(column(table, "t")).toEqual([1, 2]);
  });

  it("rejects ragged rows and non-numeric cells", () => {
    expect(() => parseMetricCsv("a,b\n1\n")).toThrow(/row 1/);
    expect(() => parseMetricCsv("a,b\n1,x\n")).toThrow(/non-numeric/);
    expect(() => parseMetricCsv("")).toThrow(/empty/);
  });

  it("rejects unknown column lookups", () => {
    const table = parseMetricCsv("t,a\n1,2\n");
    expect(() => column(table, "b")).toThrow(/no column/);
  });
});

describe("fixture bundle", () => {
  it("reads a real per-seed metrics file", () => {
    const table = readMetricCsv(
      join(FIXTURES, "imwu_xi20", "metrics_seed_0.csv"),
    );
    expect(table.header[0]).toBe("t");
    expect(table.rows.length).toBe(120);
    const t = column(table, "t");
    expect(t[0]).toBe(1);
    expect(t[t.length - 1]).toBe(120);
  });

  it("reads and validates a real summary file", () => {
    const summary = readSummary(join(FIXTURES, "imwu_xi20", "summary.json"));
    expect(summary.seeds).toEqual([0, 1, 2]);
    expect(summary.T).toBe(120);
    expect(summary.lambda_star).toBeGreaterThan(0);
    expect(gapColumns(summary)).toEqual([
      "reward_gap_1", "reward_gap_2", "reward_gap_3",
    ]);
    for (const name of gapColumns(summary)) {
      expect(summary.mean[name].length).toBe(120);
      for (const v of summary.variance[name]) {
        expect(v).toBeGreaterThanOrEqual(0);
      }
    }
  });

  it("summary mean matches the average of the per-seed CSV columns", () => {
    const summary = readSummary(join(FIXTURES, "imwu_xi20", "summary.json"));
    const tables = [0, 1, 2].map((s) =>
      readMetricCsv(join(FIXTURES, "imwu_xi20", `metrics_seed_${s}.csv`)),
    );
    const cols = tables.map((tbl) => column(tbl, "normalized_reward"));
    for (const t of [0, 59, 119]) {
      const avg = (cols[0][t] + cols[1][t] + cols[2][t]) / 3;
      expect(summary.mean["normalized_reward"][t]).toBeCloseTo(avg, 12);
    }
  });

  it("rejects summaries with missing keys", () => {
    expect(() =>
      readSummary(join(FIXTURES, "imwu_xi20", "metrics_seed_0.csv")),
    ).toThrow();
  });
});
