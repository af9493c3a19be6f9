/**
 * Parsing of the study/observable CSV formats.
 *
 * Study CSVs have the header `parameter,value`, numeric data rows, and
 * optional `# key = value` footer lines carrying fit metadata.  Observable
 * CSVs have a `t,<name>,...` header and one row per sample time.  Footer
 * values are kept as the exact byte strings found in the file, so that
 * annotations can reproduce them verbatim.
 */

export class EmptyCsvError extends Error {}
export class MalformedCsvError extends Error {}

export interface StudyCsv {
  rows: Array<{ parameter: number; value: number }>;
  /** footer entries in file order, values verbatim */
  footer: Map<string, string>;
}

export interface SeriesCsv {
  names: string[]; // column names after `t`
  times: number[];
  columns: number[][]; // one array per name
}

const FOOTER_RE = /^#\s*(\S+)\s*=\s*(.*)$/;

function splitLines(text: string): string[] {
  return text.split("\n").filter((line) => line.length > 0);
}

function parseNumber(token: string, where: string, allowNan = false): number {
  if (allowNan && token.trim().toLowerCase() === "nan") return NaN;
  const v = Number(token);
  if (token.trim() === "" || Number.isNaN(v)) {
    throw new MalformedCsvError(`${where}: not a number: ${JSON.stringify(token)}`);
  }
  return v;
}

export function parseStudyCsv(text: string): StudyCsv {
  const lines = splitLines(text);
  if (lines.length === 0) throw new EmptyCsvError("file is empty");
  if (lines[0].trim() !== "parameter,value") {
    throw new MalformedCsvError(`unexpected header ${JSON.stringify(lines[0])}`);
  }
  const rows: StudyCsv["rows"] = [];
  const footer = new Map<string, string>();
  for (const line of lines.slice(1)) {
    const m = FOOTER_RE.exec(line);
    if (m) {
      footer.set(m[1], m[2]);
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== 2) {
      throw new MalformedCsvError(`expected two columns, got ${JSON.stringify(line)}`);
    }
    rows.push({
      parameter: parseNumber(parts[0], "parameter"),
      value: parseNumber(parts[1], "value"),
    });
  }
  if (rows.length === 0) throw new EmptyCsvError("no data rows");
  const slope = footer.get("slope");
  if (slope !== undefined && !Number.isFinite(Number(slope))) {
    throw new MalformedCsvError(`footer slope is not finite: ${JSON.stringify(slope)}`);
  }
  return { rows, footer };
}

export function parseSeriesCsv(text: string): SeriesCsv {
  const lines = splitLines(text).filter((l) => !l.startsWith("#"));
  if (lines.length === 0) throw new EmptyCsvError("file is empty");
  const header = lines[0].split(",");
  if (header[0] !== "t" || header.length < 2) {
    throw new MalformedCsvError(`unexpected header ${JSON.stringify(lines[0])}`);
  }
  const names = header.slice(1);
  const times: number[] = [];
  const columns: number[][] = names.map(() => []);
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== header.length) {
      throw new MalformedCsvError(`row width mismatch: ${JSON.stringify(line)}`);
    }
    times.push(parseNumber(parts[0], "t"));
    parts.slice(1).forEach((tok, i) => columns[i].push(parseNumber(tok, names[i], true)));
  }
  if (times.length === 0) throw new EmptyCsvError("no data rows");
  return { names, times, columns };
}
