/**
 * Checker model-file format: exact-decimal JSON consumed by the nnequiv CLI.
 *
 * All numeric payloads are written as decimal strings so no binary-float
 * value ever reaches the checker; the truncation precision is explicit and
 * recorded in the provenance block.
 */

export type ActivationName = "relu" | "hardtanh" | "linear";

export interface CheckerLayer {
  weights: string[][]; // rows = source nodes, columns = destination nodes
  biases: string[];
  activation: ActivationName;
}

export interface Provenance {
  framework: string;
  epochs?: number;
  seed?: number;
  decimals: number;
  orientation_assumed?: string;
  [key: string]: unknown;
}

export interface CheckerModel {
  name: string;
  inputs: number;
  input_bounds: Array<[string, string] | null> | null;
  layers: CheckerLayer[];
  output_scale?: string;
  provenance?: Provenance;
}

export const SUPPORTED_ACTIVATIONS: ReadonlySet<string> = new Set([
  "relu",
  "hardtanh",
  "linear",
]);

/** Exact decimal text with at most `decimals` fractional digits. */
export function toDecimalString(value: number, decimals = 9): string {
  if (!Number.isFinite(value)) {
    throw new Error(`non-finite value ${value} cannot be exported`);
  }
  const fixed = value.toFixed(decimals);
  if (!fixed.includes(".")) {
    return fixed;
  }
  const trimmed = fixed.replace(/0+$/, "").replace(/\.$/, "");
  // Normalize negative zero artifacts like "-0".
  return trimmed === "-0" ? "0" : trimmed;
}

export function paramCount(model: CheckerModel): number {
  let total = 0;
  for (const layer of model.layers) {
    for (const row of layer.weights) {
      total += row.length;
    }
    total += layer.biases.length;
  }
  return total;
}

export function renderModel(model: CheckerModel): string {
  return JSON.stringify(model, null, 2) + "\n";
}
