#!/usr/bin/env node
/** Command line entry: `b4nls-report <run-dir> [<out-dir>]`. */

import { renderRun } from "./render.js";

function main(argv: string[]): number {
  const args = argv.slice(2);
  if (args.length < 1 || args.length > 2) {
    console.error("usage: b4nls-report <run-dir> [<out-dir>]");
    return 1;
  }
  const runDir = args[0];
  const outDir = args[1] ?? `${runDir}/report`;
  try {
    const result = renderRun(runDir, outDir);
    for (const f of result.figures) console.log(`wrote ${outDir}/${f.figure}`);
    for (const e of result.errors) console.error(`error: ${e.source}: ${e.message}`);
    console.log(`wrote ${outDir}/report.md and ${outDir}/index.html`);
    return result.exitCode;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

process.exit(main(process.argv));
