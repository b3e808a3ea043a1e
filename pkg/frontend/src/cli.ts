#!/usr/bin/env node
/**
 * supersim-figures <kind> --in <metrics.csv> --out <figure.svg>
 *                         [--title T] [--width W] [--height H]
 *
 * Kinds: mean-response, slowdown-cdf, conditional-slowdown,
 *        period-weights, heatmap.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { CHART_KINDS, ChartError, ChartOptions } from "./charts.js";
import { CsvError, parseCsv } from "./csv.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        title: { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  if (parsed.values.help) {
    process.stdout.write(usage());
    return 0;
  }
  const kind = parsed.positionals[0];
  if (!kind || !(kind in CHART_KINDS)) {
    process.stderr.write(
      `error: expected a chart kind (${Object.keys(CHART_KINDS).join(", ")})\n`,
    );
    return 2;
  }
  const inPath = parsed.values.in;
  const outPath = parsed.values.out;
  if (!inPath || !outPath) {
    process.stderr.write("error: --in and --out are required\n");
    return 2;
  }

  const opts: ChartOptions = { title: parsed.values.title };
  if (parsed.values.width !== undefined) opts.width = parseDim(parsed.values.width, "width");
  if (parsed.values.height !== undefined) opts.height = parseDim(parsed.values.height, "height");

  let raw: string;
  try {
    raw = readFileSync(inPath, "utf8");
  } catch (err) {
    process.stderr.write(`error: cannot read ${inPath}: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const rows = parseCsv(raw);
    const svg = CHART_KINDS[kind](rows, opts);
    writeFileSync(outPath, svg + "\n");
  } catch (err) {
    if (err instanceof CsvError || err instanceof ChartError || err instanceof RangeError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  return 0;
}

function parseDim(value: string, name: string): number {
  const n = Number(value);
  if (!Number.isFinite(n) || n < 100) {
    throw new RangeError(`--${name} must be a number >= 100, got ${value}`);
  }
  return n;
}

function usage(): string {
  return (
    "usage: supersim-figures <kind> --in FILE.csv --out FILE.svg " +
    "[--title T] [--width W] [--height H]\n" +
    `kinds: ${Object.keys(CHART_KINDS).join(", ")}\n`
  );
}

// invoked directly (not imported by tests)
const isMain =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}
