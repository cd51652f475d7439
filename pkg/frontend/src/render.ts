#!/usr/bin/env node
/** render --spec <figure.json>
 *
 * Reads a figure spec, consumes the scenario runner's CSV/JSON artifacts
 * (read-only), and writes one SVG file. Exits nonzero naming the offending
 * file on missing or inconsistent inputs.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { ArtifactError } from "./csv.js";
import { FigureSpec, renderFigure } from "./figures.js";

function loadSpec(path: string): FigureSpec {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new ArtifactError(path, "cannot read figure spec");
  }
  let spec: FigureSpec;
  try {
    spec = JSON.parse(text) as FigureSpec;
  } catch (err) {
    throw new ArtifactError(path, `invalid JSON (${(err as Error).message})`);
  }
  if (!spec.kind || !spec.output) {
    throw new ArtifactError(path, "figure spec needs 'kind' and 'output'");
  }
  spec.inputs = spec.inputs ?? [];
  const base = dirname(resolve(path));
  spec.inputs = spec.inputs.map((p) => resolve(base, p));
  spec.output = resolve(base, spec.output);
  return spec;
}

export function main(argv: string[]): number {
  const args = argv.slice(2);
  const specIdx = args.indexOf("--spec");
  if (specIdx === -1 || specIdx + 1 >= args.length) {
    console.error("usage: render --spec <figure.json>");
    return 2;
  }
  try {
    const spec = loadSpec(args[specIdx + 1]);
    const svg = renderFigure(spec);
    writeFileSync(spec.output, svg, "utf-8");
    console.log(`wrote ${spec.output} (${svg.length} bytes)`);
    return 0;
  } catch (err) {
    if (err instanceof ArtifactError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ? resolve(process.argv[1]) : "";
if (import.meta.url === `file://${entry}`) {
  process.exit(main(process.argv));
}
