/**
 * Readers for the frozen experiment output formats.
 *
 * Per-seed metric CSV:
 *   t,reward_gap_1..reward_gap_R,normalized_reward,occupied_1..occupied_C
 * Cross-seed summary JSON:
 *   { lambda_star, seeds, T, mean: {col: number[]}, variance: {col: number[]} }
 *
 * Both are plain formats produced by the experiment harness; this module
 * never writes to them.
 */

import { readFileSync } from "node:fs";

export interface MetricTable {
  header: string[];
  /** rows[t][col], including the leading t column */
  rows: number[][];
}

export interface Summary {
  lambda_star: number;
  seeds: number[];
  T: number;
  mean: Record<string, number[]>;
  variance: Record<string, number[]>;
}

export function parseMetricCsv(text: string): MetricTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty metric CSV");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, idx) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${idx + 1} has ${cells.length} cells, expected ${header.length}`);
    }
    return cells.map((cell) => {
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new Error(`non-numeric cell ${JSON.stringify(cell)} in row ${idx + 1}`);
      }
      return value;
    });
  });
  return { header, rows };
}

export function readMetricCsv(path: string): MetricTable {
  return parseMetricCsv(readFileSync(path, "utf8"));
}

export function column(table: MetricTable, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`no column ${JSON.stringify(name)} in metric CSV`);
  }
  return table.rows.map((row) => row[idx]);
}

export function readSummary(path: string): Summary {
  const raw = JSON.parse(readFileSync(path, "utf8")) as Summary;
  for (const key of ["lambda_star", "seeds", "T", "mean", "variance"] as const) {
    if (!(key in raw)) {
      throw new Error(`summary file missing key ${JSON.stringify(key)}`);
    }
  }
  const T = raw.T;
  for (const [name, series] of Object.entries(raw.mean)) {
    if (series.length !== T || raw.variance[name]?.length !== T) {
      throw new Error(`summary column ${name} has inconsistent length`);
    }
  }
  return raw;
}

/** Names of the reward-gap columns in ascending objective order. */
export function gapColumns(summary: Summary): string[] {
  return Object.keys(summary.mean)
    .filter((name) => name.startsWith("reward_gap_"))
    .sort(
      (a, b) =>
        Number(a.slice("reward_gap_".length)) - Number(b.slice("reward_gap_".length)),
    );
}
