/**
 * Reader for the solver's CSV outputs: comma separator, '.' decimals,
 * header row, LF line endings, no quoting.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header row");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `row ${i + 1} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    return cells;
  });
  if (rows.length === 0) {
    throw new CsvError("empty CSV: header but no data rows");
  }
  return { header, rows };
}

/** Numeric column by name; blank cells are dropped with their row index kept. */
export function column(
  table: Table,
  name: string,
): { values: number[]; rowIndex: number[] } {
  const k = table.header.indexOf(name);
  if (k < 0) {
    throw new CsvError(
      `missing column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  const values: number[] = [];
  const rowIndex: number[] = [];
  table.rows.forEach((row, i) => {
    if (row[k] === "") return;
    const v = Number(row[k]);
    if (!Number.isFinite(v)) {
      throw new CsvError(`column '${name}' row ${i + 1}: not a number: '${row[k]}'`);
    }
    values.push(v);
    rowIndex.push(i);
  });
  return { values, rowIndex };
}
