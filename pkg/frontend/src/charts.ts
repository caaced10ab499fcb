/**
 * Chart construction and server-side SVG rendering (echarts SSR).
 *
 * Two standard figures:
 *   gap chart   — metric vs T_checkpoint, log-log (rate slope readable);
 *   gap*T chart — metric vs T_checkpoint, log x / linear y (a plateau means
 *                 the gap decays like 1/T).
 * Titles, axis names and legend entries all come from CSV vocabulary only.
 */

import * as echarts from "echarts";

import { Series } from "./series.js";

export type ChartOption = echarts.EChartsOption;

export interface ChartAxes {
  logX: boolean;
  logY: boolean;
}

/** The two figures the CLI renders by default. */
export const STANDARD_CHARTS: ReadonlyArray<{ metric: string; axes: ChartAxes; file: string }> = [
  { metric: "gap_reported", axes: { logX: true, logY: true }, file: "gap.svg" },
  { metric: "gap_times_T", axes: { logX: true, logY: false }, file: "gap_times_T.svg" },
];

export function chartOption(
  metric: string,
  series: Series[],
  axes: ChartAxes,
): ChartOption {
  return {
    animation: false,
    backgroundColor: "#ffffff",
    title: { text: `${metric} vs T_checkpoint`, left: "center" },
    legend: { data: series.map((s) => s.algo), bottom: 0 },
    grid: { left: 70, right: 30, top: 50, bottom: 60 },
    xAxis: {
      type: axes.logX ? "log" : "value",
      name: "T_checkpoint",
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: {
      type: axes.logY ? "log" : "value",
      name: metric,
      nameLocation: "middle",
      nameGap: 55,
    },
    series: series.map((s) => ({
      name: s.algo,
      type: "line",
      showSymbol: true,
      symbolSize: 5,
      data: s.points,
    })),
  };
}

/** Render an option to a standalone SVG document string. */
export function renderSvg(option: ChartOption, width = 760, height = 520): string {
  const chart = echarts.init(null, null, { renderer: "svg", ssr: true, width, height });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
