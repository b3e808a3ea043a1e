/**
 * CSV access for the simulator's result files.
 *
 * Every file the simulator writes has a one-line header and plain numeric
 * or tag-like cells, so parsing is delegated to papaparse and this module
 * only adds column validation and typed row extraction.
 */

import Papa from "papaparse";

export class CsvError extends Error {}

export type Row = Record<string, string>;

/** Parse CSV text into header-keyed string rows; blank lines dropped. */
export function parseCsv(text: string): Row[] {
  const res = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (res.errors.length > 0) {
    const e = res.errors[0];
    throw new CsvError(`CSV parse error at row ${e.row}: ${e.message}`);
  }
  return res.data;
}

/** Assert the header has every column in `needed` (extras are fine). */
export function requireColumns(rows: Row[], needed: string[], what: string): void {
  if (rows.length === 0) {
    throw new CsvError(`${what}: no data rows`);
  }
  const have = new Set(Object.keys(rows[0]));
  const missing = needed.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new CsvError(`${what}: missing column(s) ${missing.join(", ")}`);
  }
}

/** Numeric cell access; rejects NaN so schema slips fail loudly. */
export function num(row: Row, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new CsvError(`non-numeric value ${JSON.stringify(row[col])} in column ${col}`);
  }
  return v;
}
