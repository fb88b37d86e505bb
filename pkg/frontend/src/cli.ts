#!/usr/bin/env node
/** plot-bench <csv> <out.png> [--log-y]
 *
 * Renders the bench CSV as a two-panel log-x figure (mean and standard
 * deviation of the mean absolute estimator error versus shot count), one
 * curve per ensemble.  Exits 0 on success; a schema mismatch or unreadable
 * input exits nonzero with a diagnostic and writes no file.
 */
import * as fs from "node:fs";
import * as process from "node:process";
import { pathToFileURL } from "node:url";

import { CsvError, parseBenchCsv } from "./csv.js";
import { buildFigure, renderFigure } from "./figure.js";
import { encodePng } from "./png.js";

export function main(argv: string[]): number {
  const args = argv.filter((a) => a !== "--log-y");
  const logY = argv.includes("--log-y");
  if (args.length !== 2) {
    process.stderr.write("usage: plot-bench <bench.csv> <out.png> [--log-y]\n");
    return 2;
  }
  const [csvPath, outPath] = args;
  let text: string;
  try {
    text = fs.readFileSync(csvPath, "utf-8");
  } catch (err) {
    process.stderr.write(`cannot read ${csvPath}: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    const rows = parseBenchCsv(text);
    const model = buildFigure(rows, logY);
    const png = encodePng(renderFigure(model));
    fs.writeFileSync(outPath, png);
  } catch (err) {
    if (err instanceof CsvError) {
      process.stderr.write(`invalid bench CSV: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

const entry = process.argv[1];
if (entry && import.meta.url === pathToFileURL(entry).href) {
  process.exit(main(process.argv.slice(2)));
}
