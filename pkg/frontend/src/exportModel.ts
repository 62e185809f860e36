/**
 * Export a trained sequential dense network into the checker format.
 *
 * Sources: an in-memory tfjs LayersModel (the training path) or a plain
 * JSON weights dump ({ layers: [{weights, biases, activation}] }).  Weight
 * matrices are brought into the checker's x.W orientation (rows = source
 * nodes); dumps declaring "out-in" orientation are transposed.
 */

import type * as tfTypes from "@tensorflow/tfjs";
import * as fs from "fs";

import {
  ActivationName,
  CheckerLayer,
  CheckerModel,
  Provenance,
  SUPPORTED_ACTIVATIONS,
  toDecimalString,
} from "./modelFormat";

export interface RawLayer {
  weights: number[][];
  biases: number[];
  activation: string;
}

export interface ExportOptions {
  name: string;
  decimals?: number;
  inputBounds?: Array<[string, string] | null> | null;
  /** Replace the final layer's activation (e.g. a clamp applied outside the
   * trained stack); only "hardtanh" is meaningful here. */
  outputActivation?: ActivationName;
  outputScale?: string;
  provenance?: Partial<Provenance>;
}

function asActivation(name: string, layerIndex: number): ActivationName {
  const canonical = name.toLowerCase();
  if (!SUPPORTED_ACTIVATIONS.has(canonical)) {
    throw new Error(
      `layer ${layerIndex}: unsupported activation '${name}' (supported: relu, hardtanh, linear)`
    );
  }
  return canonical as ActivationName;
}

export function transpose(matrix: number[][]): number[][] {
  if (matrix.length === 0) {
    return [];
  }
  return matrix[0].map((_, col) => matrix.map((row) => row[col]));
}

/** Pull dense (weights, biases, activation) triples out of a LayersModel. */
export function rawLayersFromTfjs(model: tfTypes.LayersModel): RawLayer[] {
  const layers: RawLayer[] = [];
  for (const layer of model.layers) {
    const className = layer.getClassName();
    if (className === "InputLayer") {
      continue;
    }
    if (className !== "Dense") {
      throw new Error(`unsupported layer type '${className}'; only dense stacks export`);
    }
    const config = layer.getConfig() as { activation?: string | { name?: string } };
    const activation =
      typeof config.activation === "string"
        ? config.activation
        : config.activation?.name ?? "linear";
    const [kernel, bias] = layer.getWeights();
    // tfjs dense kernels are [inputDim, units]: already x.W orientation.
    layers.push({
      weights: kernel.arraySync() as number[][],
      biases: bias ? (bias.arraySync() as number[]) : [],
      activation,
    });
  }
  if (layers.length === 0) {
    throw new Error("model contains no dense layers");
  }
  return layers;
}

export function rawLayersFromDump(
  doc: unknown,
  orientation: "in-out" | "out-in" = "in-out"
): RawLayer[] {
  if (typeof doc !== "object" || doc === null || !Array.isArray((doc as any).layers)) {
    throw new Error("weights dump must be an object with a 'layers' array");
  }
  return (doc as any).layers.map((raw: any, index: number) => {
    if (!Array.isArray(raw?.weights) || !Array.isArray(raw?.biases)) {
      throw new Error(`layer ${index + 1}: expected 'weights' and 'biases' arrays`);
    }
    const weights = orientation === "out-in" ? transpose(raw.weights) : raw.weights;
    return {
      weights,
      biases: raw.biases,
      activation: String(raw.activation ?? "linear"),
    };
  });
}

export function exportModel(rawLayers: RawLayer[], options: ExportOptions): CheckerModel {
  const decimals = options.decimals ?? 9;
  if (decimals < 1 || decimals > 18) {
    throw new Error(`decimals must be in 1..18, got ${decimals}`);
  }
  const layers: CheckerLayer[] = rawLayers.map((raw, index) => {
    const widths = new Set(raw.weights.map((row) => row.length));
    if (widths.size > 1) {
      throw new Error(`layer ${index + 1}: ragged weight rows`);
    }
    return {
      weights: raw.weights.map((row) => row.map((w) => toDecimalString(w, decimals))),
      biases: raw.biases.map((b) => toDecimalString(b, decimals)),
      activation: asActivation(raw.activation, index + 1),
    };
  });
  if (options.outputActivation) {
    const last = layers[layers.length - 1];
    if (last.activation !== "linear") {
      throw new Error(
        `cannot override output activation: final layer already uses '${last.activation}'`
      );
    }
    last.activation = options.outputActivation;
  }

  const inputs = rawLayers[0].weights.length;
  for (let i = 1; i < layers.length; i += 1) {
    if (layers[i].weights.length !== layers[i - 1].biases.length) {
      throw new Error(
        `layer ${i + 1}: expects ${layers[i].weights.length} inputs but previous layer emits ${layers[i - 1].biases.length}`
      );
    }
  }
  if (options.inputBounds && options.inputBounds.length !== inputs) {
    throw new Error(
      `input_bounds has ${options.inputBounds.length} entries for ${inputs} inputs`
    );
  }

  const model: CheckerModel = {
    name: options.name,
    inputs,
    input_bounds: options.inputBounds ?? null,
    layers,
    provenance: {
      framework: "unknown",
      ...options.provenance,
      decimals,
    },
  };
  if (options.outputScale !== undefined) {
    model.output_scale = options.outputScale;
  }
  return model;
}

export function exportTfjsModel(
  model: tfTypes.LayersModel,
  options: ExportOptions
): CheckerModel {
  return exportModel(rawLayersFromTfjs(model), {
    ...options,
    provenance: { framework: "tfjs", ...options.provenance },
  });
}

export function exportDumpFile(
  sourcePath: string,
  options: ExportOptions & { orientation?: "in-out" | "out-in" }
): CheckerModel {
  const doc = JSON.parse(fs.readFileSync(sourcePath, "utf8"));
  const raw = rawLayersFromDump(doc, options.orientation ?? "in-out");
  return exportModel(raw, {
    ...options,
    provenance: {
      framework: "json-dump",
      orientation_assumed: options.orientation ?? "in-out",
      ...options.provenance,
    },
  });
}
