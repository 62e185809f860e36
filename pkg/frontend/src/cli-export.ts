#!/usr/bin/env node
/**
 * nnequiv-export: convert a dense-network weights dump into the checker's
 * model format.
 *
 *   nnequiv-export source.json -o model.json --name my_net [--decimals 9]
 *     [--orientation in-out|out-in] [--output-activation hardtanh]
 *     [--output-scale 1.04] [--bounds "lo:hi,lo:hi,..."] [--epochs N] [--seed N]
 */

import * as fs from "fs";
import * as path from "path";
import { parseArgs } from "util";

import { exportDumpFile } from "./exportModel";
import { renderModel } from "./modelFormat";

function parseBounds(spec: string | undefined): Array<[string, string]> | null {
  if (!spec) {
    return null;
  }
  return spec.split(",").map((pair, index) => {
    const parts = pair.split(":");
    if (parts.length !== 2) {
      throw new Error(`--bounds entry ${index + 1}: expected LO:HI, got '${pair}'`);
    }
    return [parts[0].trim(), parts[1].trim()] as [string, string];
  });
}

function main(): number {
  const { values, positionals } = parseArgs({
    options: {
      output: { type: "string", short: "o" },
      name: { type: "string" },
      decimals: { type: "string", default: "9" },
      orientation: { type: "string", default: "in-out" },
      "output-activation": { type: "string" },
      "output-scale": { type: "string" },
      bounds: { type: "string" },
      epochs: { type: "string" },
      seed: { type: "string" },
    },
    allowPositionals: true,
  });
  const [source] = positionals;
  if (!source || !values.output) {
    console.error(
      "usage: nnequiv-export SOURCE.json -o MODEL.json [--name N] [--decimals 9]" +
        " [--orientation in-out|out-in] [--output-activation hardtanh]" +
        " [--output-scale S] [--bounds LO:HI,...]"
    );
    return 2;
  }
  const orientation = values.orientation as "in-out" | "out-in";
  if (orientation !== "in-out" && orientation !== "out-in") {
    console.error(`error: unknown orientation '${values.orientation}'`);
    return 2;
  }
  if (values["output-activation"] && values["output-activation"] !== "hardtanh") {
    console.error("error: only 'hardtanh' can override the output activation");
    return 2;
  }
  const model = exportDumpFile(source, {
    name: values.name ?? path.basename(values.output).replace(/\.json$/, ""),
    decimals: Number(values.decimals),
    orientation,
    inputBounds: parseBounds(values.bounds),
    outputActivation: values["output-activation"] as "hardtanh" | undefined,
    outputScale: values["output-scale"],
    provenance: {
      epochs: values.epochs ? Number(values.epochs) : undefined,
      seed: values.seed ? Number(values.seed) : undefined,
    },
  });
  fs.writeFileSync(values.output, renderModel(model), "utf8");
  console.log(`wrote ${values.output} (${model.inputs} inputs, ${model.layers.length} layers)`);
  return 0;
}

try {
  process.exit(main());
} catch (err) {
  console.error(`error: ${err instanceof Error ? err.message : err}`);
  process.exit(1);
}
