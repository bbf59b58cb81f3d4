/**
 * Minimal deterministic SVG chart primitives: linear scales, tick
 * selection and path construction.  Everything is emitted as plain
 * strings with a fixed number format so a re-run on the same inputs is
 * byte-identical.
 */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/** Round-numbered ticks covering [min, max], roughly `count` of them. */
export function niceTicks(min: number, max: number, count = 5): number[] {
  if (min === max) {
    return [min];
  }
  const rawStep = (max - min) / Math.max(count, 1);
  const magnitude = 10 ** Math.floor(Math.log10(rawStep));
  let step = magnitude;
  for (const multiple of [1, 2, 5, 10]) {
    if (magnitude * multiple >= rawStep) {
      step = magnitude * multiple;
      break;
    }
  }
  const first = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let tick = first; tick <= max + step * 1e-9; tick += step) {
    // snap to the step grid to avoid float drift in labels
    ticks.push(Math.round(tick / step) * step);
  }
  return ticks;
}

/** Fixed coordinate format: two decimals, no negative zero. */
export function fmt(value: number): string {
  const rounded = Math.round(value * 100) / 100;
  const clean = Object.is(rounded, -0) ? 0 : rounded;
  return clean.toString();
}

/** Tick-label format: up to four significant digits. */
export function fmtTick(value: number): string {
  const rounded = Number(value.toPrecision(4));
  const clean = Object.is(rounded, -0) ? 0 : rounded;
  return clean.toString();
}

export function polylinePath(xs: number[], ys: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${fmt(xs[i])},${fmt(ys[i])}`);
  }
  return parts.join("");
}

/** Closed band between an upper and a lower curve over shared x values. */
export function bandPath(xs: number[], upper: number[], lower: number[]): string {
  const forward = polylinePath(xs, upper);
  const backParts: string[] = [];
  for (let i = xs.length - 1; i >= 0; i--) {
    backParts.push(`L${fmt(xs[i])},${fmt(lower[i])}`);
  }
  return `${forward}${backParts.join("")}Z`;
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

export const DASHES = ["", "6 3", "2 2", "8 3 2 3"];
