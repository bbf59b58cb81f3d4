#!/usr/bin/env node
/**
 * Usage:
 *   reusealloc-plots --kind gap-curves --out fig.svg label=path/summary.json ...
 *
 * Each positional argument is `label=path` pointing at a summary JSON
 * written by the experiment harness.  Inputs are read-only; the only
 * file written is --out.
 */

import { writeFileSync } from "node:fs";
import { readSummary } from "./data.js";
import { renderFigure } from "./figures.js";
import type { FigureKind, LabeledSummary } from "./figures.js";

const KINDS: FigureKind[] = ["gap-curves", "normalized-comparison", "j-sweep"];

export function parseArgs(argv: string[]): {
  kind: FigureKind;
  out: string;
  inputs: { label: string; path: string }[];
} {
  let kind: string | undefined;
  let out: string | undefined;
  const inputs: { label: string; path: string }[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--kind") {
      kind = argv[++i];
    } else if (arg === "--out") {
      out = argv[++i];
    } else {
      const eq = arg.indexOf("=");
      if (eq <= 0) {
        throw new Error(`expected label=path, got ${JSON.stringify(arg)}`);
      }
      inputs.push({ label: arg.slice(0, eq), path: arg.slice(eq + 1) });
    }
  }
  if (!kind || !(KINDS as string[]).includes(kind)) {
    throw new Error(`--kind must be one of ${KINDS.join(", ")}`);
  }
  if (!out) {
    throw new Error("--out is required");
  }
  if (inputs.length === 0) {
    throw new Error("at least one label=summary.json input is required");
  }
  return { kind: kind as FigureKind, out, inputs };
}

export function main(argv: string[]): void {
  const { kind, out, inputs } = parseArgs(argv);
  const entries: LabeledSummary[] = inputs.map(({ label, path }) => ({
    label,
    summary: readSummary(path),
  }));
  writeFileSync(out, renderFigure(kind, entries));
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  try {
    main(process.argv.slice(2));
  } catch (error) {
    console.error(String(error instanceof Error ? error.message : error));
    process.exit(2);
  }
}
