/**
 * The three figure kinds, each rendered to a standalone SVG string:
 *
 *  - gap-curves: per-objective reward-gap mean curves with cross-seed
 *    variance bands, one panel per input summary (e.g. paired capacity
 *    regimes side by side);
 *  - normalized-comparison: normalized-reward mean curves of several
 *    policies overlaid on one panel;
 *  - j-sweep: reward-gap curves overlaid across arrival-universe sizes
 *    (color by size, dash by objective).
 *
 * Bands show mean +/- one standard deviation (sqrt of the stored
 * cross-seed variance).
 */

import { gapColumns } from "./data.js";
import type { Summary } from "./data.js";
import {
  DASHES, PALETTE, bandPath, escapeXml, fmt, fmtTick, linearScale,
  niceTicks, polylinePath,
} from "./svg.js";

export interface LabeledSummary {
  label: string;
  summary: Summary;
}

export type FigureKind = "gap-curves" | "normalized-comparison" | "j-sweep";

const PANEL_WIDTH = 460;
const PANEL_HEIGHT = 340;
const MARGIN = { left: 64, right: 16, top: 36, bottom: 48 } as const;

interface Series {
  name: string;
  mean: number[];
  variance: number[];
  color: string;
  dash: string;
}

function stddev(variance: number[]): number[] {
  return variance.map((v) => Math.sqrt(Math.max(v, 0)));
}

function dataExtent(seriesList: Series[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const series of seriesList) {
    const sd = stddev(series.variance);
    for (let t = 0; t < series.mean.length; t++) {
      lo = Math.min(lo, series.mean[t] - sd[t]);
      hi = Math.max(hi, series.mean[t] + sd[t]);
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

function renderPanel(
  originX: number,
  title: string,
  yLabel: string,
  seriesList: Series[],
): string {
  const T = seriesList[0].mean.length;
  const x = linearScale(
    [1, T],
    [originX + MARGIN.left, originX + PANEL_WIDTH - MARGIN.right],
  );
  const y = linearScale(dataExtent(seriesList), [
    PANEL_HEIGHT - MARGIN.bottom,
    MARGIN.top,
  ]);
  const steps = Array.from({ length: T }, (_, i) => i + 1);
  const xs = steps.map(x);
  const parts: string[] = [];

  // frame and title
  parts.push(
    `<rect x="${fmt(x.range[0])}" y="${fmt(y.range[1])}" ` +
      `width="${fmt(x.range[1] - x.range[0])}" height="${fmt(y.range[0] - y.range[1])}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${fmt((x.range[0] + x.range[1]) / 2)}" y="${fmt(MARGIN.top - 12)}" ` +
      `text-anchor="middle" font-size="14">${escapeXml(title)}</text>`,
  );

  // axes ticks and labels
  for (const tick of niceTicks(1, T)) {
    const px = x(tick);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(y.range[0])}" x2="${fmt(px)}" y2="${fmt(y.range[0] + 4)}" stroke="#333"/>`,
    );
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(y.range[0] + 16)}" text-anchor="middle" font-size="10">${fmtTick(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(y.domain[0], y.domain[1])) {
    const py = y(tick);
    parts.push(
      `<line x1="${fmt(x.range[0] - 4)}" y1="${fmt(py)}" x2="${fmt(x.range[0])}" y2="${fmt(py)}" stroke="#333"/>`,
    );
    parts.push(
      `<text x="${fmt(x.range[0] - 7)}" y="${fmt(py + 3)}" text-anchor="end" font-size="10">${fmtTick(tick)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt((x.range[0] + x.range[1]) / 2)}" y="${fmt(PANEL_HEIGHT - 10)}" ` +
      `text-anchor="middle" font-size="12">t</text>`,
  );
  parts.push(
    `<text x="${fmt(originX + 14)}" y="${fmt((y.range[0] + y.range[1]) / 2)}" ` +
      `text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 ${fmt(originX + 14)} ${fmt((y.range[0] + y.range[1]) / 2)})">` +
      `${escapeXml(yLabel)}</text>`,
  );

  // variance bands under the mean curves
  for (const series of seriesList) {
    const sd = stddev(series.variance);
    const upper = series.mean.map((m, t) => y(m + sd[t]));
    const lower = series.mean.map((m, t) => y(m - sd[t]));
    parts.push(
      `<path d="${bandPath(xs, upper, lower)}" fill="${series.color}" fill-opacity="0.15" stroke="none"/>`,
    );
  }
  for (const series of seriesList) {
    const ys = series.mean.map(y);
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    parts.push(
      `<path d="${polylinePath(xs, ys)}" fill="none" stroke="${series.color}" stroke-width="1.5"${dash}/>`,
    );
  }

  // legend, top-right inside the frame
  seriesList.forEach((series, idx) => {
    const lx = x.range[1] - 150;
    const ly = MARGIN.top + 14 + idx * 15;
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    parts.push(
      `<line x1="${fmt(lx)}" y1="${fmt(ly - 3)}" x2="${fmt(lx + 22)}" y2="${fmt(ly - 3)}" ` +
        `stroke="${series.color}" stroke-width="1.5"${dash}/>`,
    );
    parts.push(
      `<text x="${fmt(lx + 27)}" y="${fmt(ly)}" font-size="10">${escapeXml(series.name)}</text>`,
    );
  });

  return parts.join("\n");
}

function document(width: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${PANEL_HEIGHT}" ` +
    `viewBox="0 0 ${width} ${PANEL_HEIGHT}" font-family="sans-serif">\n` +
    `<rect width="${width}" height="${PANEL_HEIGHT}" fill="white"/>\n` +
    `${body}\n</svg>\n`
  );
}

/** One panel per summary; within a panel, one curve per objective. */
export function gapCurves(panels: LabeledSummary[]): string {
  if (panels.length === 0) {
    throw new Error("gap-curves needs at least one summary");
  }
  const rendered = panels.map(({ label, summary }, panelIdx) => {
    const seriesList = gapColumns(summary).map((name, idx) => ({
      name: `objective ${idx + 1}`,
      mean: summary.mean[name],
      variance: summary.variance[name],
      color: PALETTE[idx % PALETTE.length],
      dash: "",
    }));
    return renderPanel(panelIdx * PANEL_WIDTH, label, "reward gap", seriesList);
  });
  return document(PANEL_WIDTH * panels.length, rendered.join("\n"));
}

/** Single panel overlaying each summary's normalized-reward curve. */
export function normalizedComparison(entries: LabeledSummary[]): string {
  if (entries.length === 0) {
    throw new Error("normalized-comparison needs at least one summary");
  }
  const seriesList = entries.map(({ label, summary }, idx) => ({
    name: label,
    mean: summary.mean["normalized_reward"],
    variance: summary.variance["normalized_reward"],
    color: PALETTE[idx % PALETTE.length],
    dash: "",
  }));
  return document(
    PANEL_WIDTH,
    renderPanel(0, "normalized reward", "normalized reward", seriesList),
  );
}

/** Single panel: reward-gap curves across arrival-universe sizes. */
export function jSweep(entries: LabeledSummary[]): string {
  if (entries.length === 0) {
    throw new Error("j-sweep needs at least one summary");
  }
  const seriesList: Series[] = [];
  entries.forEach(({ label, summary }, entryIdx) => {
    gapColumns(summary).forEach((name, objIdx) => {
      seriesList.push({
        name: `${label} obj ${objIdx + 1}`,
        mean: summary.mean[name],
        variance: summary.variance[name],
        color: PALETTE[entryIdx % PALETTE.length],
        dash: DASHES[objIdx % DASHES.length],
      });
    });
  });
  return document(
    PANEL_WIDTH,
    renderPanel(0, "reward gap across arrival-universe sizes", "reward gap", seriesList),
  );
}

export function renderFigure(kind: FigureKind, entries: LabeledSummary[]): string {
  switch (kind) {
    case "gap-curves":
      return gapCurves(entries);
    case "normalized-comparison":
      return normalizedComparison(entries);
    case "j-sweep":
      return jSweep(entries);
    default:
      throw new Error(`unknown figure kind ${JSON.stringify(kind)}`);
  }
}
