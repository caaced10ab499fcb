import { describe, expect, it } from "vitest";

import type { MetricRow } from "../src/csv.js";
import { SeriesError, algorithmsIn, metricSeries } from "../src/series.js";

function row(partial: Partial<MetricRow>): MetricRow {
  return {
    algo: "ce_smooth",
    game: "toy",
    etaMode: "constant",
    eta: "0.2",
    checkpoint: 1,
    player: 1,
    metric: "gap_reported",
    value: 0.5,
    ...partial,
  };
}

describe("metricSeries", () => {
  it("takes the worst player per checkpoint and sorts by T", () => {
    const rows = [
      row({ checkpoint: 8, player: 1, value: 0.10 }),
      row({ checkpoint: 8, player: 2, value: 0.30 }),
      row({ checkpoint: 2, player: 1, value: 0.90 }),
      row({ checkpoint: 2, player: 2, value: 0.40 }),
    ];
    const series = metricSeries(rows, "gap_reported");
    expect(series).toEqual([
      { algo: "ce_smooth", points: [[2, 0.9], [8, 0.3]] },
    ]);
  });

  it("splits series by algorithm and sorts algorithm names", () => {
    const rows = [
      row({ algo: "cce_stage", checkpoint: 4, value: 0.2 }),
      row({ algo: "ce_smooth", checkpoint: 4, value: 0.1 }),
      row({ algo: "cce_smooth", checkpoint: 4, value: 0.3 }),
    ];
    const series = metricSeries(rows, "gap_reported");
    expect(series.map((s) => s.algo)).toEqual(["cce_smooth", "cce_stage", "ce_smooth"]);
  });

  it("skips guarded (null) values", () => {
    const rows = [
      row({ checkpoint: 1, value: null }),
      row({ checkpoint: 2, value: 0.7 }),
    ];
    const series = metricSeries(rows, "gap_reported");
    expect(series[0].points).toEqual([[2, 0.7]]);
  });

  it("ignores rows for other metrics", () => {
    const rows = [
      row({ metric: "gap_upper", checkpoint: 1, value: 9.0 }),
      row({ metric: "gap_reported", checkpoint: 1, value: 0.25 }),
    ];
    const series = metricSeries(rows, "gap_reported");
    expect(series[0].points).toEqual([[1, 0.25]]);
  });

  it("rejects metrics outside the CSV vocabulary", () => {
    expect(() => metricSeries([row({})], "gap_typo")).toThrow(SeriesError);
    expect(() => metricSeries([row({})], "gap_typo")).toThrow(/unknown metric/);
    expect(() => metricSeries([row({})], "gap_typo")).toThrow(/value_certified/);
  });

  it("rejects metrics with no plottable rows", () => {
    const rows = [row({ metric: "gap_exact", value: null })];
    expect(() => metricSeries(rows, "gap_exact")).toThrow(/no plottable rows/);
  });
});

describe("algorithmsIn", () => {
  it("lists distinct algorithms sorted", () => {
    const rows = [
      row({ algo: "ce_smooth" }),
      row({ algo: "cce_stage" }),
      row({ algo: "ce_smooth" }),
    ];
    expect(algorithmsIn(rows)).toEqual(["cce_stage", "ce_smooth"]);
  });
});
