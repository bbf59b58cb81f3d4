import { createHash } from "node:crypto";
import { mkdtempSync, readFileSync, readdirSync, statSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { readSummary } from "../src/data.js";
import {
  gapCurves, jSweep, normalizedComparison, renderFigure,
} from "../src/figures.js";
import { main, parseArgs } from "../src/cli.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function load(label: string) {
  return { label, summary: readSummary(join(FIXTURES, label, "summary.json")) };
}

function hashTree(root: string): string {
  const hash = createHash("sha256");
  const walk = (dir: string) => {
    for (const name of readdirSync(dir).sort()) {
      const path = join(dir, name);
      if (statSync(path).isDirectory()) {
        walk(path);
      } else {
        hash.update(name);
        hash.update(readFileSync(path));
      }
    }
  };
  walk(root);
  return hash.digest("hex");
}

const TWO_XI = [load("imwu_xi20"), load("imwu_xi200")];
const POLICIES = [load("imwu_xi200"), load("osa_xi200")];
const SWEEP = [load("imwu_J4"), load("imwu_J6")];

describe("figure generation from the frozen bundle", () => {
  it("renders all three kinds without error and leaves inputs untouched", () => {
    const before = hashTree(FIXTURES);
    const figures = {
      "gap-curves": gapCurves(TWO_XI),
      "normalized-comparison": normalizedComparison(POLICIES),
      "j-sweep": jSweep(SWEEP),
    };
    for (const svg of Object.values(figures)) {
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
      // balanced path elements, no NaN coordinates
      expect(svg).not.toContain("NaN");
      expect(svg).not.toContain("Infinity");
    }
    expect(hashTree(FIXTURES)).toBe(before);
  });

  it("re-rendering is byte-identical", () => {
    for (const [kind, entries] of [
      ["gap-curves", TWO_XI],
      ["normalized-comparison", POLICIES],
      ["j-sweep", SWEEP],
    ] as const) {
      const first = renderFigure(kind, entries);
      const second = renderFigure(kind, entries);
      expect(second).toBe(first);
    }
  });

  it("gap-curves gives one panel per summary with objective legends", () => {
    const svg = gapCurves(TWO_XI);
    expect(svg).toContain(">imwu_xi20<");
    expect(svg).toContain(">imwu_xi200<");
    expect((svg.match(/objective 1/g) ?? []).length).toBe(2);
    expect((svg.match(/objective 3/g) ?? []).length).toBe(2);
    // one band + one line per objective per panel
    expect((svg.match(/fill-opacity="0.15"/g) ?? []).length).toBe(6);
  });

  it("normalized-comparison overlays one curve per policy", () => {
    const svg = normalizedComparison(POLICIES);
    expect(svg).toContain(">imwu_xi200<");
    expect(svg).toContain(">osa_xi200<");
    expect((svg.match(/fill-opacity="0.15"/g) ?? []).length).toBe(2);
  });

  it("j-sweep overlays every objective of every size", () => {
    const svg = jSweep(SWEEP);
    expect(svg).toContain("imwu_J4 obj 1");
    expect(svg).toContain("imwu_J6 obj 3");
    expect((svg.match(/fill-opacity="0.15"/g) ?? []).length).toBe(6);
  });

  it("axis labels are present", () => {
    const svg = gapCurves(TWO_XI);
    expect(svg).toContain(">t</text>");
    expect(svg).toContain("reward gap");
    expect(normalizedComparison(POLICIES)).toContain("normalized reward");
  });

  it("rejects empty input lists", () => {
    expect(() => gapCurves([])).toThrow();
    expect(() => normalizedComparison([])).toThrow();
    expect(() => jSweep([])).toThrow();
  });
});

describe("command line", () => {
  it("parses arguments", () => {
    const parsed = parseArgs([
      "--kind", "gap-curves", "--out", "fig.svg", "a=x.json", "b=y.json",
    ]);
    expect(parsed.kind).toBe("gap-curves");
    expect(parsed.inputs).toEqual([
      { label: "a", path: "x.json" },
      { label: "b", path: "y.json" },
    ]);
  });

  it("rejects bad arguments", () => {
    expect(() => parseArgs(["--kind", "pie", "--out", "f", "a=b"])).toThrow(/--kind/);
    expect(() => parseArgs(["--kind", "j-sweep", "a=b"])).toThrow(/--out/);
    expect(() => parseArgs(["--kind", "j-sweep", "--out", "f"])).toThrow(/input/);
    expect(() => parseArgs(["--kind", "j-sweep", "--out", "f", "nopath"])).toThrow(/label=path/);
  });

  it("writes the figure file, and a re-run is byte-identical", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "fig.svg");
    const args = [
      "--kind", "normalized-comparison", "--out", out,
      `imwu=${join(FIXTURES, "imwu_xi200", "summary.json")}`,
      `osa=${join(FIXTURES, "osa_xi200", "summary.json")}`,
    ];
    main(args);
    const first = readFileSync(out);
    main(args);
    expect(readFileSync(out).equals(first)).toBe(true);
    expect(first.toString("utf8")).toContain("<svg ");
  });
});
