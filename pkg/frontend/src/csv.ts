/** Parsing and validation of the bench CSV schema. */

export interface BenchRow {
  ensemble: string;
  n: number;
  meanAbsError: number;
  stdAbsError: number;
  bootstrapSize: number;
  seed: number;
}

export class CsvError extends Error {}

export const EXPECTED_COLUMNS = [
  "ensemble",
  "N",
  "mean_abs_error",
  "std_abs_error",
  "bootstrap_size",
  "seed",
] as const;

/** Parse the bench CSV; throws CsvError with a column diagnostic on mismatch. */
export function parseBenchCsv(text: string): BenchRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV: expected a header line " + EXPECTED_COLUMNS.join(","));
  }
  const header = lines[0].split(",").map((c) => c.trim());
  for (const col of EXPECTED_COLUMNS) {
    if (!header.includes(col)) {
      throw new CsvError(`missing column '${col}' in header [${header.join(", ")}]`);
    }
  }
  const idx = Object.fromEntries(EXPECTED_COLUMNS.map((c) => [c, header.indexOf(c)]));
  if (lines.length === 1) {
    throw new CsvError("CSV has a header but no data rows");
  }

  const rows: BenchRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",").map((c) => c.trim());
    if (cells.length !== header.length) {
      throw new CsvError(`row ${i + 1}: expected ${header.length} cells, found ${cells.length}`);
    }
    const num = (col: string): number => {
      const value = Number(cells[idx[col]]);
      if (!Number.isFinite(value)) {
        throw new CsvError(`row ${i + 1}: column '${col}' is not numeric: '${cells[idx[col]]}'`);
      }
      return value;
    };
    const row: BenchRow = {
      ensemble: cells[idx["ensemble"]],
      n: num("N"),
      meanAbsError: num("mean_abs_error"),
      stdAbsError: num("std_abs_error"),
      bootstrapSize: num("bootstrap_size"),
      seed: num("seed"),
    };
    if (row.n <= 0) {
      throw new CsvError(`row ${i + 1}: column 'N' must be positive, got ${row.n}`);
    }
    rows.push(row);
  }
  return rows;
}
