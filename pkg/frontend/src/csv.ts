/**
 * Minimal strict CSV access for the simulator's artifact files.
 *
 * The emitter writes plain comma-separated text with a single header row
 * and no quoting, so no general CSV machinery is needed here.  Truncated
 * files (a run that died mid-write) keep their complete rows.
 */

export class SchemaError extends Error {}

export class Table {
  readonly columns: string[];
  readonly rows: string[][];

  constructor(columns: string[], rows: string[][]) {
    this.columns = columns;
    this.rows = rows;
  }

  get rowCount(): number {
    return this.rows.length;
  }

  /** Index of a required column; mentions the column by name when absent. */
  require(name: string): number {
    const idx = this.columns.indexOf(name);
    if (idx < 0) {
      throw new SchemaError(`missing required column '${name}'`);
    }
    return idx;
  }

  numeric(name: string): number[] {
    const idx = this.require(name);
    return this.rows.map((row) => Number(row[idx]));
  }

  strings(name: string): string[] {
    const idx = this.require(name);
    return this.rows.map((row) => row[idx]);
  }
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV file");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: string[][] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length === columns.length) {
      rows.push(cells);
    }
    // rows with the wrong cell count are dropped: a truncated final line
    // from an interrupted run should not kill the whole figure
  }
  return new Table(columns, rows);
}
