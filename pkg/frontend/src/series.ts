/**
 * Chart series extraction: one series per algorithm present in the rows.
 *
 * A series point at checkpoint T is the worst (maximum) value of the metric
 * over the players at that checkpoint — the figures track the worst player's
 * gap. Guarded cells carry no number and are skipped. No metric is ever
 * recomputed here; the values are plotted as the CSV carries them.
 */

import { MetricRow, METRIC_VOCABULARY } from "./csv.js";

export interface Series {
  algo: string;
  /** [T_checkpoint, value] pairs, ascending in T. */
  points: Array<[number, number]>;
}

export class SeriesError extends Error {}

/** Per-algorithm worst-player curves of one metric. */
export function metricSeries(rows: MetricRow[], metric: string): Series[] {
  if (!METRIC_VOCABULARY.has(metric)) {
    throw new SeriesError(
      `unknown metric "${metric}"; the schema carries ${[...METRIC_VOCABULARY].sort().join(", ")}`,
    );
  }
  const byAlgo = new Map<string, Map<number, number>>();
  for (const row of rows) {
    if (row.metric !== metric || row.value === null) {
      continue;
    }
    let curve = byAlgo.get(row.algo);
    if (curve === undefined) {
      curve = new Map();
      byAlgo.set(row.algo, curve);
    }
    const prev = curve.get(row.checkpoint);
    if (prev === undefined || row.value > prev) {
      curve.set(row.checkpoint, row.value);
    }
  }
  if (byAlgo.size === 0) {
    throw new SeriesError(`metric "${metric}" has no plottable rows`);
  }
  return [...byAlgo.keys()].sort().map((algo) => {
    const curve = byAlgo.get(algo)!;
    const points = [...curve.entries()].sort((a, b) => a[0] - b[0]);
    return { algo, points };
  });
}

/** The algorithms present in the rows, sorted (for legends and messages). */
export function algorithmsIn(rows: MetricRow[]): string[] {
  return [...new Set(rows.map((r) => r.algo))].sort();
}
