/**
 * Run-directory renderer: reads a manifest plus the CSV artifacts it lists,
 * writes one SVG figure per study CSV, and an index.html / report.md pair.
 * Figure names are keyed by the run's config hash, so re-rendering the same
 * run is byte-stable and distinct runs never collide.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { EmptyCsvError, MalformedCsvError, parseSeriesCsv, parseStudyCsv } from "./csv.js";
import { escapeXml, renderLogLog, renderSeries } from "./svg.js";

export interface Manifest {
  kind: string;
  dim: number | null;
  config_hash: string;
  files: Record<string, string>;
  status: string;
  error: string | null;
}

export interface FigureEntry {
  source: string;
  figure: string;
  annotatedSlope?: string;
  slopeFromFooter?: boolean;
}

export interface ErrorEntry {
  source: string;
  message: string;
}

export interface ReportResult {
  figures: FigureEntry[];
  errors: ErrorEntry[];
  /** nonzero only when every input failed */
  exitCode: number;
}

/** Dashed reference slopes drawn for each study kind (n = spatial dimension). */
export function guideSlopes(kind: string, dim: number | null): number[] {
  if (kind === "decay" && dim !== null) return [-dim / 4, -dim / 2];
  if (kind === "smalldisp") return [3];
  return [];
}

export function loadManifest(runDir: string): Manifest {
  const p = path.join(runDir, "manifest.json");
  if (!fs.existsSync(p)) throw new Error(`no manifest at ${p}`);
  return JSON.parse(fs.readFileSync(p, "utf8")) as Manifest;
}

const SERIES_FILES = new Set(["observables.csv"]);

export function renderRun(runDir: string, outDir: string): ReportResult {
  const manifest = loadManifest(runDir);
  fs.mkdirSync(outDir, { recursive: true });
  const hashTag = manifest.config_hash.slice(0, 12);

  const figures: FigureEntry[] = [];
  const errors: ErrorEntry[] = [];
  const csvs = Object.keys(manifest.files)
    .filter((f) => f.endsWith(".csv"))
    .sort();

  for (const name of csvs) {
    const src = path.join(runDir, name);
    const figureName = `${path.basename(name, ".csv")}_${hashTag}.svg`;
    try {
      const text = fs.readFileSync(src, "utf8");
      const title = `${manifest.kind}: ${name} [${hashTag}]`;
      if (SERIES_FILES.has(name)) {
        const svg = renderSeries(parseSeriesCsv(text), title);
        fs.writeFileSync(path.join(outDir, figureName), svg);
        figures.push({ source: name, figure: figureName });
      } else {
        const study = parseStudyCsv(text);
        const fig = renderLogLog(study, title, guideSlopes(manifest.kind, manifest.dim));
        fs.writeFileSync(path.join(outDir, figureName), fig.svg);
        figures.push({
          source: name,
          figure: figureName,
          annotatedSlope: fig.annotatedSlope,
          slopeFromFooter: fig.slopeFromFooter,
        });
      }
    } catch (err) {
      if (err instanceof EmptyCsvError || err instanceof MalformedCsvError || err instanceof Error) {
        errors.push({ source: name, message: (err as Error).message });
      } else {
        throw err;
      }
    }
  }

  const md = reportMarkdown(manifest, figures, errors);
  fs.writeFileSync(path.join(outDir, "report.md"), md);
  fs.writeFileSync(path.join(outDir, "index.html"), indexHtml(manifest, figures, errors));

  const exitCode = csvs.length > 0 && figures.length === 0 ? 1 : 0;
  return { figures, errors, exitCode };
}

function reportMarkdown(m: Manifest, figures: FigureEntry[], errors: ErrorEntry[]): string {
  const lines: string[] = [];
  lines.push(`# Run report: ${m.kind}`);
  lines.push("");
  lines.push(`- config hash: \`${m.config_hash}\``);
  lines.push(`- status: ${m.status}${m.error ? ` (${m.error})` : ""}`);
  lines.push("");
  if (figures.length) {
    lines.push("## Figures");
    lines.push("");
    for (const f of figures) {
      const slope =
        f.annotatedSlope !== undefined
          ? ` — slope ${f.annotatedSlope}${f.slopeFromFooter ? "" : " (fitted)"}`
          : "";
      lines.push(`- [${f.source}](${f.figure})${slope}`);
    }
    lines.push("");
  }
  if (errors.length) {
    lines.push("## Errors");
    lines.push("");
    for (const e of errors) {
      lines.push(`- ${e.source}: ${e.message}`);
    }
    lines.push("");
  }
  return lines.join("\n");
}

function indexHtml(m: Manifest, figures: FigureEntry[], errors: ErrorEntry[]): string {
  const parts: string[] = [];
  parts.push("<!DOCTYPE html>");
  parts.push(`<html><head><meta charset="utf-8"><title>${escapeXml(m.kind)} report</title></head><body>`);
  parts.push(`<h1>Run report: ${escapeXml(m.kind)}</h1>`);
  parts.push(`<p>config hash <code>${escapeXml(m.config_hash)}</code> — status ${escapeXml(m.status)}</p>`);
  for (const f of figures) {
    parts.push(`<h2>${escapeXml(f.source)}</h2>`);
    parts.push(`<img src="${escapeXml(f.figure)}" alt="${escapeXml(f.source)}">`);
  }
  if (errors.length) {
    parts.push("<h2>Errors</h2><ul>");
    for (const e of errors) {
      parts.push(`<li>${escapeXml(e.source)}: ${escapeXml(e.message)}</li>`);
    }
    parts.push("</ul>");
  }
  parts.push("</body></html>");
  return parts.join("\n") + "\n";
}
