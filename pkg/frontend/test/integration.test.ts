/**
 * End-to-end export checks against the primary checker, reached only
 * through its CLI and file formats.
 */

import * as tf from "@tensorflow/tfjs";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { exportTfjsModel } from "../src/exportModel";
import { CheckerModel, renderModel } from "../src/modelFormat";
import { evalWithPrimary, validateWithPrimary } from "../src/primary";
import {
  MPC_INPUT_BOUNDS,
  buildWideClassifier,
  mulberry32,
  trainBitvecModel,
  trainControllerModel,
} from "../src/trainFixtures";

let dir: string;

beforeAll(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "nnequiv-export-"));
});

afterAll(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function writeModel(name: string, model: CheckerModel): string {
  const p = path.join(dir, name);
  fs.writeFileSync(p, renderModel(model), "utf8");
  return p;
}

/** Random input grid values that are exact in float32 and in decimal text. */
function float32ExactInputs(count: number, dims: number, seed: number): number[][] {
  const rand = mulberry32(seed);
  return Array.from({ length: count }, () =>
    Array.from({ length: dims }, () => Math.floor(rand() * 1024) / 1024)
  );
}

function boundedFloat32ExactInputs(
  count: number,
  bounds: Array<[string, string]>,
  seed: number
): number[][] {
  const rand = mulberry32(seed);
  return Array.from({ length: count }, () =>
    bounds.map(([lo, hi]) => {
      const a = Number(lo);
      const b = Number(hi);
      // Snap to a 1/1024 grid so tfjs (float32) and the exact evaluator see
      // the same input values.
      const raw = a + (b - a) * rand();
      const snapped = Math.round(raw * 1024) / 1024;
      return Math.min(Math.max(snapped, a), b);
    })
  );
}

function predictBatch(model: tf.LayersModel, inputs: number[][]): number[][] {
  const xs = tf.tensor2d(inputs);
  try {
    const ys = model.predict(xs) as tf.Tensor;
    const values = ys.arraySync() as number[][];
    ys.dispose();
    return values;
  } finally {
    xs.dispose();
  }
}

function maxAbsGap(a: number[][], b: number[][]): number {
  let worst = 0;
  for (let i = 0; i < a.length; i += 1) {
    for (let j = 0; j < a[i].length; j += 1) {
      worst = Math.max(worst, Math.abs(a[i][j] - b[i][j]));
    }
  }
  return worst;
}

describe("bit-vector classifier export", () => {
  it("exports, validates, and matches the exact evaluator within 1e-5", async () => {
    const model = await trainBitvecModel(1, { epochs: 3, seed: 501 });
    const exported = exportTfjsModel(model, {
      name: "bitvec_test",
      inputBounds: Array.from({ length: 10 }, () => ["0", "1"]),
      provenance: { epochs: 3, seed: 501 },
    });
    const modelPath = writeModel("bitvec_test.json", exported);
    expect(validateWithPrimary(modelPath)).toBe(132);

    const inputs = float32ExactInputs(100, 10, 1);
    const source = predictBatch(model, inputs);
    const exact = evalWithPrimary(modelPath, inputs);
    expect(maxAbsGap(source, exact)).toBeLessThan(1e-5);
    model.dispose();
  });

  it("is reproducible: same seed, identical exported bytes", async () => {
    const texts: string[] = [];
    for (let round = 0; round < 2; round += 1) {
      const model = await trainBitvecModel(1, { epochs: 2, seed: 77 });
      texts.push(
        renderModel(
          exportTfjsModel(model, { name: "repro", provenance: { seed: 77 } })
        )
      );
      model.dispose();
    }
    expect(texts[0]).toBe(texts[1]);
  });
});

describe("wide classifier shape export", () => {
  it("exports a 784-10-10 stack with exactly 7960 parameters", () => {
    const model = buildWideClassifier(784, 901);
    const exported = exportTfjsModel(model, { name: "wide_test" });
    const modelPath = writeModel("wide_test.json", exported);
    expect(validateWithPrimary(modelPath)).toBe(7960);
    model.dispose();
  });
});

describe("controller export with hard-tanh output and scale", () => {
  it("exports, validates, and matches clamp-plus-scale semantics within 1e-5", async () => {
    const model = await trainControllerModel({ epochs: 2, seed: 31 }, 45, 500);
    const exported = exportTfjsModel(model, {
      name: "mpc_test",
      inputBounds: MPC_INPUT_BOUNDS,
      outputActivation: "hardtanh",
      outputScale: "1.04",
      provenance: { epochs: 2, seed: 31 },
    });
    const modelPath = writeModel("mpc_test.json", exported);
    expect(validateWithPrimary(modelPath)).toBe(4501);

    const inputs = boundedFloat32ExactInputs(100, MPC_INPUT_BOUNDS, 5);
    const raw = predictBatch(model, inputs);
    const source = raw.map((row) =>
      row.map((v) => 1.04 * Math.max(-1, Math.min(1, v)))
    );
    const exact = evalWithPrimary(modelPath, inputs);
    expect(maxAbsGap(source, exact)).toBeLessThan(1e-5);
    model.dispose();
  });
});

describe("checked-in fixture exports", () => {
  const fixturesDir = path.resolve(__dirname, "..", "fixtures");

  it("every committed fixture passes the primary validator", () => {
    const files = fs.readdirSync(fixturesDir).filter((f) => f.endsWith(".json"));
    expect(files.length).toBeGreaterThanOrEqual(5);
    for (const file of files) {
      expect(validateWithPrimary(path.join(fixturesDir, file))).toBeGreaterThan(0);
    }
  });

  it("controller fixtures trained for 30/35/40 epochs share one shape", () => {
    const shapes = [30, 35, 40].map((epochs) => {
      const doc = JSON.parse(
        fs.readFileSync(path.join(fixturesDir, `mpc_${epochs}.json`), "utf8")
      ) as CheckerModel;
      return {
        inputs: doc.inputs,
        widths: doc.layers.map((layer) => layer.biases.length),
        activations: doc.layers.map((layer) => layer.activation),
        scale: doc.output_scale,
      };
    });
    expect(shapes[1]).toEqual(shapes[0]);
    expect(shapes[2]).toEqual(shapes[0]);
    expect(shapes[0].widths).toEqual([45, 45, 45, 1]);
  });

  it("bit-vector fixtures cover both architectures", () => {
    const arch1 = JSON.parse(
      fs.readFileSync(path.join(fixturesDir, "bitvec_arch1.json"), "utf8")
    ) as CheckerModel;
    const arch2 = JSON.parse(
      fs.readFileSync(path.join(fixturesDir, "bitvec_arch2.json"), "utf8")
    ) as CheckerModel;
    expect(arch1.layers.map((l) => l.biases.length)).toEqual([10, 2]);
    expect(arch2.layers.map((l) => l.biases.length)).toEqual([10, 10, 2]);
  });
});
