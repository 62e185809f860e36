#!/usr/bin/env node
/**
 * nnequiv-convert-mpc: normalize the controller dataset text layout into
 * one-sample-per-line CSV (six inputs, then the target).
 *
 *   nnequiv-convert-mpc data.txt -o data.csv
 */

import { parseArgs } from "util";

import { convertMpcDataset } from "./convertMpc";

function main(): number {
  const { values, positionals } = parseArgs({
    options: { output: { type: "string", short: "o" } },
    allowPositionals: true,
  });
  const [source] = positionals;
  if (!source || !values.output) {
    console.error("usage: nnequiv-convert-mpc SOURCE.txt -o OUT.csv");
    return 2;
  }
  const result = convertMpcDataset(source, values.output);
  console.log(
    `wrote ${result.outPath}: ${result.samples} samples (${result.orientation})`
  );
  return 0;
}

try {
  process.exit(main());
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
