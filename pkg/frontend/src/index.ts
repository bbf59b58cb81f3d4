export type { MetricTable, Summary } from "./data.js";
export { column, gapColumns, parseMetricCsv, readMetricCsv, readSummary } from "./data.js";
export type { FigureKind, LabeledSummary } from "./figures.js";
export { gapCurves, jSweep, normalizedComparison, renderFigure } from "./figures.js";
export { bandPath, fmt, fmtTick, linearScale, niceTicks, polylinePath } from "./svg.js";
