/**
 * Seeded desk-scale fixture training.
 *
 * Three families mirror the case studies: bit-vector classifiers (two
 * architectures, label = "three or more consecutive ones"), a wide
 * image-classifier shape (untrained init is enough for shape/param checks),
 * and a lane-keeping-style regression controller trained for several epoch
 * counts.  Checked-in exports are authoritative; this module only exists to
 * regenerate them reproducibly.
 */

import * as tf from "@tensorflow/tfjs";

import { exportTfjsModel } from "./exportModel";
import { CheckerModel } from "./modelFormat";

/** Deterministic uniform generator for synthetic datasets. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function hasThreeConsecutiveOnes(bits: number[]): boolean {
  let streak = 0;
  for (const bit of bits) {
    streak = bit === 1 ? streak + 1 : 0;
    if (streak >= 3) {
      return true;
    }
  }
  return false;
}

export function allBitVectors(n: number): number[][] {
  const out: number[][] = [];
  for (let value = 0; value < 2 ** n; value += 1) {
    const bits: number[] = [];
    for (let j = n - 1; j >= 0; j -= 1) {
      bits.push((value >> j) & 1);
    }
    out.push(bits);
  }
  return out;
}

function denseStack(
  inputDim: number,
  widths: number[],
  outputs: number,
  seed: number,
  outputActivation: "linear" = "linear"
): tf.Sequential {
  const model = tf.sequential();
  widths.forEach((units, index) => {
    model.add(
      tf.layers.dense({
        units,
        activation: "relu",
        inputShape: index === 0 ? [inputDim] : undefined,
        kernelInitializer: tf.initializers.glorotUniform({ seed: seed + index }),
        biasInitializer: "zeros",
      })
    );
  });
  model.add(
    tf.layers.dense({
      units: outputs,
      activation: outputActivation,
      inputShape: widths.length === 0 ? [inputDim] : undefined,
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + widths.length }),
      biasInitializer: "zeros",
    })
  );
  return model;
}

export interface TrainOptions {
  epochs: number;
  seed: number;
}

/** 10-bit classifier, architecture 1 (one hidden layer) or 2 (two). */
export async function trainBitvecModel(
  architecture: 1 | 2,
  options: TrainOptions
): Promise<tf.Sequential> {
  const widths = architecture === 1 ? [10] : [10, 10];
  const model = denseStack(10, widths, 2, options.seed);
  model.compile({ optimizer: tf.train.adam(), loss: "meanSquaredError" });
  const vectors = allBitVectors(10);
  const labels = vectors.map((bits) =>
    hasThreeConsecutiveOnes(bits) ? [0, 1] : [1, 0]
  );
  const xs = tf.tensor2d(vectors);
  const ys = tf.tensor2d(labels);
  try {
    await model.fit(xs, ys, {
      epochs: options.epochs,
      batchSize: 128,
      shuffle: false,
      verbose: 0,
    });
  } finally {
    xs.dispose();
    ys.dispose();
  }
  return model;
}

export const MPC_INPUT_BOUNDS: Array<[string, string]> = [
  ["-2", "2"],
  ["-1.04", "1.04"],
  ["-1", "1"],
  ["-0.8", "0.8"],
  ["-1.04", "1.04"],
  ["-0.01", "0.01"],
];

export function syntheticControllerTarget(x: number[]): number {
  const raw =
    0.35 * x[0] - 0.6 * x[1] + 0.4 * x[2] * x[3] - 0.7 * x[4] + 25 * x[5];
  return Math.max(-1, Math.min(1, raw));
}

export function syntheticControllerData(
  samples: number,
  seed: number
): { inputs: number[][]; targets: number[] } {
  const rand = mulberry32(seed);
  const inputs: number[][] = [];
  const targets: number[] = [];
  for (let i = 0; i < samples; i += 1) {
    const x = MPC_INPUT_BOUNDS.map(([lo, hi]) => {
      const a = Number(lo);
      const b = Number(hi);
      return a + (b - a) * rand();
    });
    inputs.push(x);
    targets.push(syntheticControllerTarget(x));
  }
  return { inputs, targets };
}

/** 6-45-45-45-1 regression controller; exported with a hard-tanh output
 * stage and the 1.04 output scale. */
export async function trainControllerModel(
  options: TrainOptions,
  hiddenWidth = 45,
  samples = 2000
): Promise<tf.Sequential> {
  const model = denseStack(6, [hiddenWidth, hiddenWidth, hiddenWidth], 1, options.seed);
  model.compile({ optimizer: tf.train.adam(), loss: "meanSquaredError" });
  const { inputs, targets } = syntheticControllerData(samples, options.seed);
  const xs = tf.tensor2d(inputs);
  const ys = tf.tensor2d(targets.map((t) => [t]));
  try {
    await model.fit(xs, ys, {
      epochs: options.epochs,
      batchSize: 512,
      shuffle: false,
      verbose: 0,
    });
  } finally {
    xs.dispose();
    ys.dispose();
  }
  return model;
}

/** Wide classifier shape (e.g. 784-10-10); initialization only. */
export function buildWideClassifier(inputDim: number, seed: number): tf.Sequential {
  return denseStack(inputDim, [10], 10, seed);
}

export interface FixtureSpec {
  file: string;
  model: CheckerModel;
}

export async function buildFixtureSet(decimals = 9): Promise<FixtureSpec[]> {
  const unitBounds: Array<[string, string]> = Array.from({ length: 10 }, () => [
    "0",
    "1",
  ]);
  const fixtures: FixtureSpec[] = [];

  for (const architecture of [1, 2] as const) {
    const epochs = 8;
    const seed = 1200 + architecture;
    const model = await trainBitvecModel(architecture, { epochs, seed });
    fixtures.push({
      file: `bitvec_arch${architecture}.json`,
      model: exportTfjsModel(model, {
        name: `bitvec_arch${architecture}`,
        decimals,
        inputBounds: unitBounds,
        provenance: { epochs, seed },
      }),
    });
    model.dispose();
  }

  for (const epochs of [30, 35, 40]) {
    const seed = 7000;
    const model = await trainControllerModel({ epochs, seed }, 45, 2000);
    fixtures.push({
      file: `mpc_${epochs}.json`,
      model: exportTfjsModel(model, {
        name: `mpc_${epochs}`,
        decimals,
        inputBounds: MPC_INPUT_BOUNDS,
        outputActivation: "hardtanh",
        outputScale: "1.04",
        provenance: { epochs, seed },
      }),
    });
    model.dispose();
  }
  return fixtures;
}
