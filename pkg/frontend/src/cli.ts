#!/usr/bin/env node
/**
 * Figure renderer for experiment CSV files.
 *
 * Default: both standard charts into --out-dir —
 *   gap.svg          gap_reported vs T_checkpoint, log-log
 *   gap_times_T.svg  gap_times_T  vs T_checkpoint, log x / linear y
 * Custom: --metric and --out render a single chart (log-log unless
 * --linear-x / --linear-y say otherwise).
 *
 * Usage:
 *   markov-oftrl-plots --input run.csv [--input more.csv ...] [--out-dir DIR]
 *   markov-oftrl-plots --input run.csv --metric gap_upper --out upper.svg [--linear-y]
 */

import { mkdir } from "node:fs/promises";
import path from "node:path";

import { STANDARD_CHARTS } from "./charts.js";
import { CsvError } from "./csv.js";
import { algorithmsIn, SeriesError } from "./series.js";
import { readRows, render, RenderError } from "./render.js";

const USAGE =
  "usage: markov-oftrl-plots --input <csv> [--input <csv> ...] [--out-dir <dir>]\n" +
  "       markov-oftrl-plots --input <csv> --metric <name> --out <file.svg> " +
  "[--linear-x] [--linear-y]";

interface Args {
  inputs: string[];
  outDir: string;
  metric?: string;
  out?: string;
  linearX: boolean;
  linearY: boolean;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = { inputs: [], outDir: ".", linearX: false, linearY: false };
  for (let k = 0; k < argv.length; k++) {
    const flag = argv[k];
    const need = () => {
      if (k + 1 >= argv.length) {
        throw new RenderError(`${flag} needs a value\n${USAGE}`);
      }
      return argv[++k];
    };
    switch (flag) {
      case "--input":
        args.inputs.push(need());
        break;
      case "--out-dir":
        args.outDir = need();
        break;
      case "--metric":
        args.metric = need();
        break;
      case "--out":
        args.out = need();
        break;
      case "--linear-x":
        args.linearX = true;
        break;
      case "--linear-y":
        args.linearY = true;
        break;
      case "--help":
      case "-h":
        console.log(USAGE);
        process.exit(0);
        break;
      default:
        throw new RenderError(`unknown flag ${flag}\n${USAGE}`);
    }
  }
  if (args.inputs.length === 0) {
    throw new RenderError(`--input is required\n${USAGE}`);
  }
  if ((args.metric === undefined) !== (args.out === undefined)) {
    throw new RenderError(`--metric and --out go together\n${USAGE}`);
  }
  return args;
}

export async function main(argv: string[]): Promise<number> {
  try {
    const args = parseArgs(argv);
    const rows = await readRows(args.inputs);
    console.log(`algorithms present: ${algorithmsIn(rows).join(", ")}`);
    if (args.metric !== undefined && args.out !== undefined) {
      const algos = await render(
        {
          inputs: args.inputs,
          metric: args.metric,
          output: args.out,
          axes: { logX: !args.linearX, logY: !args.linearY },
        },
        rows,
      );
      console.log(`wrote ${args.out} (${algos.length} series)`);
    } else {
      await mkdir(args.outDir, { recursive: true });
      for (const chart of STANDARD_CHARTS) {
        const output = path.join(args.outDir, chart.file);
        const algos = await render(
          { inputs: args.inputs, metric: chart.metric, output, axes: chart.axes },
          rows,
        );
        console.log(`wrote ${output} (${algos.length} series)`);
      }
    }
    return 0;
  } catch (err) {
    if (err instanceof RenderError || err instanceof CsvError || err instanceof SeriesError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("markov-oftrl-plots")) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
