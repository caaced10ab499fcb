/**
 * render(spec): CSV file(s) -> one chart image on disk.
 *
 * A pure consumer of the experiment CSV: reads, extracts the metric's
 * per-algorithm series, renders, writes. Output format follows the file
 * extension; SVG is native, PNG is refused with an explanation (rasterizing
 * needs a native canvas binding that is deliberately not a dependency).
 */

import { readFile, writeFile } from "node:fs/promises";
import path from "node:path";

import { chartOption, ChartAxes, renderSvg } from "./charts.js";
import { CsvError, MetricRow, parseMetricsCsv } from "./csv.js";
import { metricSeries } from "./series.js";

export interface PlotSpec {
  /** One or more CSV files; their rows are concatenated. */
  inputs: string[];
  metric: string;
  output: string;
  axes: ChartAxes;
}

export class RenderError extends Error {}

export async function readRows(inputs: string[]): Promise<MetricRow[]> {
  if (inputs.length === 0) {
    throw new RenderError("no input CSV files given");
  }
  const rows: MetricRow[] = [];
  for (const input of inputs) {
    let text: string;
    try {
      text = await readFile(input, "utf-8");
    } catch (err) {
      throw new RenderError(`cannot read ${input}: ${(err as Error).message}`);
    }
    rows.push(...parseMetricsCsv(text, input));
  }
  return rows;
}

/** Renders one chart; returns the algorithms plotted (sorted). */
export async function render(spec: PlotSpec, rows?: MetricRow[]): Promise<string[]> {
  const ext = path.extname(spec.output).toLowerCase();
  if (ext === ".png") {
    throw new RenderError(
      `cannot write ${spec.output}: PNG output needs a native canvas binding; ` +
        "write an .svg file instead",
    );
  }
  if (ext !== ".svg") {
    throw new RenderError(`unsupported output extension "${ext}"; use .svg`);
  }
  const data = rows ?? (await readRows(spec.inputs));
  const series = metricSeries(data, spec.metric);
  const svg = renderSvg(chartOption(spec.metric, series, spec.axes));
  await writeFile(spec.output, svg, "utf-8");
  return series.map((s) => s.algo);
}

export { CsvError };
