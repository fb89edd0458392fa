#!/usr/bin/env node
/** stovaq-plots render --spec <figure.json>
 *
 * The spec file: { "kind": "...", "input": "path.csv", "output": "fig.svg",
 * "options": {...} }. Paths resolve relative to the spec file.
 */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { PlotInputError } from "./csv.js";
import { FigureSpec, render } from "./figures.js";

const KINDS = ["density_overlay", "charge_series", "covariance_heatmap", "convergence"];

export function loadSpec(path: string): FigureSpec {
  let raw: string;
  try {
    raw = readFileSync(path, "utf-8");
  } catch {
    throw new PlotInputError(`spec file not found: ${path}`);
  }
  let spec: FigureSpec;
  try {
    spec = JSON.parse(raw);
  } catch (e) {
    throw new PlotInputError(`invalid JSON in ${path}: ${(e as Error).message}`);
  }
  if (!KINDS.includes(spec.kind)) {
    throw new PlotInputError(`spec.kind must be one of ${KINDS.join(", ")}, got '${spec.kind}'`);
  }
  for (const key of ["input", "output"] as const) {
    if (typeof spec[key] !== "string" || spec[key].length === 0) {
      throw new PlotInputError(`spec.${key} must be a non-empty path`);
    }
  }
  const base = dirname(resolve(path));
  spec.input = resolve(base, spec.input);
  spec.output = resolve(base, spec.output);
  return spec;
}

export function main(argv: string[]): number {
  if (argv[0] !== "render" || argv[1] !== "--spec" || !argv[2] || argv.length > 3) {
    console.error("usage: stovaq-plots render --spec <figure.json>");
    return 2;
  }
  try {
    const spec = loadSpec(argv[2]);
    const svg = render(spec);
    mkdirSync(dirname(spec.output), { recursive: true });
    writeFileSync(spec.output, svg, "utf-8");
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (e) {
    if (e instanceof PlotInputError) {
      console.error(`error: ${e.message}`);
      return 1;
    }
    throw e;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
