/**
 * Deterministic SVG generation: log-log scatter with a fitted line, verbatim
 * footer annotations and dashed reference-slope guides.  Pure string
 * building — identical inputs give byte-identical output.
 */

import type { StudyCsv } from "./csv.js";
import type { SeriesCsv } from "./csv.js";
import { logLogFit } from "./fit.js";

const W = 640;
const H = 480;
const MARGIN = { left: 70, right: 20, top: 20, bottom: 50 };

function fmt(x: number): string {
  // fixed shortest-round-trip formatting keeps output deterministic
  return String(x);
}

function coord(x: number): string {
  return x.toFixed(2);
}

interface Scale {
  x: (v: number) => number;
  y: (v: number) => number;
}

function makeScale(xs: number[], ys: number[]): Scale {
  const pad = (lo: number, hi: number): [number, number] => {
    if (lo === hi) return [lo - 1, hi + 1];
    const m = 0.05 * (hi - lo);
    return [lo - m, hi + m];
  };
  const [x0, x1] = pad(Math.min(...xs), Math.max(...xs));
  const [y0, y1] = pad(Math.min(...ys), Math.max(...ys));
  return {
    x: (v) => MARGIN.left + ((v - x0) / (x1 - x0)) * (W - MARGIN.left - MARGIN.right),
    y: (v) => H - MARGIN.bottom - ((v - y0) / (y1 - y0)) * (H - MARGIN.top - MARGIN.bottom),
  };
}

function open(title: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">\n` +
    `<rect width="${W}" height="${H}" fill="white"/>\n` +
    `<text x="${W / 2}" y="14" text-anchor="middle" font-family="monospace" font-size="13">${escapeXml(title)}</text>\n`
  );
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface LogLogFigure {
  svg: string;
  /** slope actually annotated, as the exact string shown */
  annotatedSlope: string;
  /** true when the slope came from the CSV footer rather than a local fit */
  slopeFromFooter: boolean;
}

/**
 * Render a `parameter,value` study CSV as a log-log scatter.  The fitted
 * line and the slope annotation come verbatim from the footer when present;
 * otherwise a local least-squares fit supplies them (marked as such).
 * `guides` are dashed reference lines of the given log-log slopes anchored
 * at the first data point.
 */
export function renderLogLog(
  study: StudyCsv,
  title: string,
  guides: number[],
): LogLogFigure {
  const pts = study.rows.filter((r) => r.parameter > 0 && r.value > 0);
  if (pts.length < 2) {
    throw new Error("log-log figure needs at least two positive data points");
  }
  const lx = pts.map((p) => Math.log10(p.parameter));
  const ly = pts.map((p) => Math.log10(p.value));
  const scale = makeScale(lx, ly);

  const footerSlope = study.footer.get("slope");
  const footerIntercept = study.footer.get("intercept");
  let slope: number;
  let interceptLn: number;
  let annotatedSlope: string;
  let slopeFromFooter: boolean;
  if (footerSlope !== undefined) {
    slope = Number(footerSlope);
    annotatedSlope = footerSlope;
    slopeFromFooter = true;
    if (footerIntercept !== undefined && Number.isFinite(Number(footerIntercept))) {
      interceptLn = Number(footerIntercept);
    } else {
      // anchor the displayed line through the first point
      interceptLn = Math.log(pts[0].value) - slope * Math.log(pts[0].parameter);
    }
  } else {
    const fit = logLogFit(
      pts.map((p) => p.parameter),
      pts.map((p) => p.value),
    );
    slope = fit.slope;
    interceptLn = fit.intercept;
    annotatedSlope = fmt(slope);
    slopeFromFooter = false;
  }

  let body = open(title);

  // axes
  body += `<line x1="${MARGIN.left}" y1="${H - MARGIN.bottom}" x2="${W - MARGIN.right}" y2="${H - MARGIN.bottom}" stroke="black"/>\n`;
  body += `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${H - MARGIN.bottom}" stroke="black"/>\n`;
  body += `<text x="${W / 2}" y="${H - 12}" text-anchor="middle" font-family="monospace" font-size="12">log10(parameter)</text>\n`;
  body += `<text x="16" y="${H / 2}" text-anchor="middle" font-family="monospace" font-size="12" transform="rotate(-90 16 ${H / 2})">log10(value)</text>\n`;

  // dashed reference guides anchored at the first data point
  const xLo = Math.min(...lx);
  const xHi = Math.max(...lx);
  for (const gs of guides) {
    const y0 = ly[0] + gs * (xLo - lx[0]);
    const y1 = ly[0] + gs * (xHi - lx[0]);
    body += `<line data-guide-slope="${fmt(gs)}" x1="${coord(scale.x(xLo))}" y1="${coord(scale.y(y0))}" x2="${coord(scale.x(xHi))}" y2="${coord(scale.y(y1))}" stroke="#888888" stroke-dasharray="6,4"/>\n`;
  }

  // fitted line (footer fit when available)
  const LOG10E = Math.LOG10E;
  const lineY = (xl: number): number => (interceptLn + slope * (xl / LOG10E)) * LOG10E;
  body += `<line data-role="fit" x1="${coord(scale.x(xLo))}" y1="${coord(scale.y(lineY(xLo)))}" x2="${coord(scale.x(xHi))}" y2="${coord(scale.y(lineY(xHi)))}" stroke="#c02020"/>\n`;

  // scatter
  for (let i = 0; i < lx.length; i++) {
    body += `<circle cx="${coord(scale.x(lx[i]))}" cy="${coord(scale.y(ly[i]))}" r="3" fill="#1f4e9c"/>\n`;
  }

  // annotations: slope first (verbatim when from the footer), then the rest
  const lines: string[] = [];
  lines.push(
    slopeFromFooter ? `slope = ${annotatedSlope}` : `slope = ${annotatedSlope} (fitted)`,
  );
  for (const [key, val] of study.footer) {
    if (key === "slope") continue;
    lines.push(`${key} = ${val}`);
  }
  lines.forEach((text, i) => {
    body += `<text data-role="annotation" x="${MARGIN.left + 8}" y="${MARGIN.top + 16 + 14 * i}" font-family="monospace" font-size="12">${escapeXml(text)}</text>\n`;
  });

  body += "</svg>\n";
  return { svg: body, annotatedSlope, slopeFromFooter };
}

/** Render a `t,<name>,...` observable CSV as overlaid polylines. */
export function renderSeries(series: SeriesCsv, title: string): string {
  const finite = (v: number) => Number.isFinite(v);
  const allVals = series.columns.flat().filter(finite);
  if (allVals.length === 0) throw new Error("series figure has no finite values");
  const scale = makeScale(series.times, allVals);
  const palette = ["#1f4e9c", "#c02020", "#188018", "#8030a0", "#a06010", "#106060"];

  let body = open(title);
  body += `<line x1="${MARGIN.left}" y1="${H - MARGIN.bottom}" x2="${W - MARGIN.right}" y2="${H - MARGIN.bottom}" stroke="black"/>\n`;
  body += `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${H - MARGIN.bottom}" stroke="black"/>\n`;
  body += `<text x="${W / 2}" y="${H - 12}" text-anchor="middle" font-family="monospace" font-size="12">t</text>\n`;
  series.names.forEach((name, c) => {
    const color = palette[c % palette.length];
    const pts: string[] = [];
    series.times.forEach((t, i) => {
      const v = series.columns[c][i];
      if (finite(v)) pts.push(`${coord(scale.x(t))},${coord(scale.y(v))}`);
    });
    if (pts.length > 1) {
      body += `<polyline data-series="${escapeXml(name)}" points="${pts.join(" ")}" fill="none" stroke="${color}"/>\n`;
    }
    body += `<text data-role="legend" x="${W - MARGIN.right - 120}" y="${MARGIN.top + 16 + 14 * c}" font-family="monospace" font-size="12" fill="${color}">${escapeXml(name)}</text>\n`;
  });
  body += "</svg>\n";
  return body;
}
