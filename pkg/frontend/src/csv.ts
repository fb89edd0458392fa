import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class PlotInputError extends Error {}

export interface Table {
  file: string;
  columns: string[];
  rows: Record<string, number>[];
}

/** Parse an RFC-4180 CSV with a header row into numeric records. */
export function readCsv(file: string): Table {
  let text: string;
  try {
    text = readFileSync(file, "utf-8");
  } catch {
    throw new PlotInputError(`input file not found: ${file}`);
  }
  const parsed = Papa.parse<Record<string, unknown>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new PlotInputError(`cannot parse ${file}: ${e.message} (row ${e.row})`);
  }
  const rows = parsed.data as Record<string, number>[];
  if (rows.length === 0) {
    throw new PlotInputError(`empty CSV: ${file}`);
  }
  return { file, columns: parsed.meta.fields ?? [], rows };
}

/** Extract one numeric column, naming the file and column on failure. */
export function column(table: Table, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new PlotInputError(
      `missing column '${name}' in ${table.file} (has: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r, i) => {
    const v = r[name];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new PlotInputError(`non-numeric value in column '${name}' of ${table.file} (row ${i + 2})`);
    }
    return v;
  });
}

export function requireColumns(table: Table, names: string[]): void {
  for (const n of names) {
    if (!table.columns.includes(n)) {
      throw new PlotInputError(
        `missing column '${n}' in ${table.file} (has: ${table.columns.join(", ")})`,
      );
    }
  }
}
