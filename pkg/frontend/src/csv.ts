/**
 * Reader for the experiment CSV interface.
 *
 * Schema: header `algo,game,eta_mode,eta,T_checkpoint,player,metric,value`,
 * one row per (checkpoint, player, metric). `value` is a float, or the
 * marker string "guarded" when an exact enumeration was skipped; guarded
 * rows are kept with value = null so consumers can drop them explicitly.
 */

import Papa from "papaparse";

export const EXPECTED_HEADER = [
  "algo",
  "game",
  "eta_mode",
  "eta",
  "T_checkpoint",
  "player",
  "metric",
  "value",
] as const;

/** Every metric name the schema can carry. */
export const METRIC_VOCABULARY = new Set([
  "value_certified",
  "gap_exact",
  "gap_upper",
  "gap_lower",
  "gap_reported",
  "gap_times_T",
  "swapreg_max",
  "stagereg_max",
]);

export const GUARD_MARKER = "guarded";

export interface MetricRow {
  algo: string;
  game: string;
  etaMode: string;
  eta: string;
  checkpoint: number;
  player: number;
  metric: string;
  /** null marks a "guarded" cell (enumeration skipped upstream). */
  value: number | null;
}

export class CsvError extends Error {}

function fail(source: string, message: string): never {
  throw new CsvError(`${source}: ${message}`);
}

/** Parse one CSV document; throws CsvError on any schema violation. */
export function parseMetricsCsv(text: string, source: string): MetricRow[] {
  if (text.trim() === "") {
    fail(source, "no data rows");
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    fail(source, `CSV parse error: ${parsed.errors[0].message}`);
  }
  const lines = parsed.data;
  if (lines.length === 0) {
    fail(source, "no data rows");
  }
  const header = lines[0];
  if (header.join(",") !== EXPECTED_HEADER.join(",")) {
    fail(source, `unexpected header "${header.join(",")}"`);
  }
  if (lines.length === 1) {
    fail(source, "no data rows");
  }
  const rows: MetricRow[] = [];
  for (let k = 1; k < lines.length; k++) {
    const cells = lines[k];
    if (cells.length !== EXPECTED_HEADER.length) {
      fail(source, `row ${k + 1}: expected ${EXPECTED_HEADER.length} cells, got ${cells.length}`);
    }
    const [algo, game, etaMode, eta, t, player, metric, value] = cells;
    const checkpoint = Number(t);
    if (!Number.isInteger(checkpoint) || checkpoint < 1) {
      fail(source, `row ${k + 1}: bad T_checkpoint "${t}"`);
    }
    const playerNum = Number(player);
    if (!Number.isInteger(playerNum) || playerNum < 1) {
      fail(source, `row ${k + 1}: bad player "${player}"`);
    }
    if (!METRIC_VOCABULARY.has(metric)) {
      fail(source, `row ${k + 1}: unknown metric "${metric}"`);
    }
    let parsedValue: number | null;
    if (value === GUARD_MARKER) {
      parsedValue = null;
    } else {
      parsedValue = Number(value);
      if (!Number.isFinite(parsedValue)) {
        fail(source, `row ${k + 1}: bad value "${value}"`);
      }
    }
    rows.push({
      algo,
      game,
      etaMode,
      eta,
      checkpoint,
      player: playerNum,
      metric,
      value: parsedValue,
    });
  }
  return rows;
}
