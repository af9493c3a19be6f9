/**
 * Ordinary least squares in log-log coordinates, used only as a fallback
 * when a study CSV carries no fit footer.  When a footer is present its
 * values are always used verbatim; the renderer never re-fits over them.
 */

export interface LogLogFit {
  slope: number;
  intercept: number; // of log(y) against log(x), natural logs
}

export function logLogFit(xs: number[], ys: number[]): LogLogFit {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error("log-log fit needs at least two (x, y) pairs");
  }
  if (xs.some((x) => x <= 0) || ys.some((y) => y <= 0)) {
    throw new Error("log-log fit needs positive data");
  }
  const lx = xs.map(Math.log);
  const ly = ys.map(Math.log);
  const n = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx === 0) throw new Error("log-log fit is degenerate: constant abscissa");
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}
