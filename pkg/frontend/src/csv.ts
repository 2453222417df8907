/**
 * Minimal CSV reader for the harness result files.
 *
 * Handles quoted fields with embedded commas/quotes; the first row is the
 * header and every data row becomes a string record keyed by column name.
 */

export type CsvRow = Record<string, string>;

export function parseCsvLine(line: string): string[] {
  const fields: string[] = [];
  let cur = "";
  let inQuotes = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (inQuotes) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          cur += '"';
          i++;
        } else {
          inQuotes = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch === '"') {
      inQuotes = true;
    } else if (ch === ",") {
      fields.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  fields.push(cur);
  return fields;
}

export function parseCsv(text: string): CsvRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) return [];
  const header = parseCsvLine(lines[0]);
  return lines.slice(1).map((line) => {
    const fields = parseCsvLine(line);
    const row: CsvRow = {};
    header.forEach((name, i) => {
      row[name] = fields[i] ?? "";
    });
    return row;
  });
}

/** Rows with status == ok; throws when a required column is absent. */
export function okRows(rows: CsvRow[], required: string[]): CsvRow[] {
  if (rows.length > 0) {
    for (const col of ["status", ...required]) {
      if (!(col in rows[0])) {
        throw new Error(`missing column '${col}' in CSV input`);
      }
    }
  }
  return rows.filter((r) => r.status === "ok");
}
