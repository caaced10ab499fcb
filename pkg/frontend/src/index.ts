export { EXPECTED_HEADER, GUARD_MARKER, METRIC_VOCABULARY, CsvError, parseMetricsCsv } from "./csv.js";
export type { MetricRow } from "./csv.js";
export { SeriesError, algorithmsIn, metricSeries } from "./series.js";
export type { Series } from "./series.js";
export { STANDARD_CHARTS, chartOption, renderSvg } from "./charts.js";
export type { ChartAxes } from "./charts.js";
export { RenderError, readRows, render } from "./render.js";
export type { PlotSpec } from "./render.js";
