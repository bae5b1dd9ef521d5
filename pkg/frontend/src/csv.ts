import { readFileSync } from "node:fs";

// The upstream CSVs are plain comma-separated text: LF line endings, one
// mandatory header row, no quoting, floats at 17 significant digits and the
// literal token nan for undefined entries. A raw split is therefore exact.

export type Table = {
  path: string;
  header: string[];
  cells: string[][];
};

/** Raised when a CSV does not match its published schema. */
export class SchemaError extends Error {}

/** Raised when a CSV parses but its contents violate a figure's assumptions. */
export class DataError extends Error {}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new DataError(`${path}: ${(err as Error).message}`);
  }
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length < 2) {
    throw new SchemaError(`${path}: needs a header row and at least one data row`);
  }
  const header = lines[0].split(",");
  const cells: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const row = lines[i].split(",");
    if (row.length !== header.length) {
      throw new SchemaError(
        `${path}: line ${i + 1} has ${row.length} fields, header has ${header.length}`,
      );
    }
    cells.push(row);
  }
  return { path, header, cells };
}

/** Checks the header against the published column list, in order. */
export function requireColumns(table: Table, expected: string[]): void {
  const got = table.header.join(",");
  const want = expected.join(",");
  if (got !== want) {
    throw new SchemaError(
      `${table.path}: header mismatch\n  expected: ${want}\n  found:    ${got}`,
    );
  }
}

/** One column as numbers; the nan token maps to NaN, anything else must parse. */
export function numericColumn(table: Table, name: string): Float64Array {
  const k = table.header.indexOf(name);
  if (k < 0) {
    throw new SchemaError(`${table.path}: no column ${name}`);
  }
  const out = new Float64Array(table.cells.length);
  for (let i = 0; i < table.cells.length; i++) {
    const token = table.cells[i][k];
    if (token === "nan") {
      out[i] = NaN;
      continue;
    }
    const v = Number(token);
    if (!Number.isFinite(v)) {
      throw new SchemaError(
        `${table.path}: column ${name}, line ${i + 2}: not a number: ${token}`,
      );
    }
    out[i] = v;
  }
  return out;
}

/** One column as raw strings (for label columns such as the outcome class). */
export function stringColumn(table: Table, name: string): string[] {
  const k = table.header.indexOf(name);
  if (k < 0) {
    throw new SchemaError(`${table.path}: no column ${name}`);
  }
  return table.cells.map((row) => row[k]);
}
