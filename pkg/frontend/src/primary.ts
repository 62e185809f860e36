/**
 * Bridge to the primary checker, used strictly through its command-line
 * interface and file formats (no in-process coupling).
 *
 * The CLI is located via NNEQUIV_CLI or found as `nnequiv` on PATH.
 */

import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

export function primaryCli(): string {
  return process.env.NNEQUIV_CLI ?? "nnequiv";
}

function run(args: string[]): { stdout: string; status: number } {
  const result = spawnSync(primaryCli(), args, { encoding: "utf8" });
  if (result.error) {
    throw new Error(`cannot run primary CLI '${primaryCli()}': ${result.error.message}`);
  }
  if (result.status !== 0) {
    throw new Error(
      `primary CLI exited ${result.status}: ${result.stderr.trim() || result.stdout.trim()}`
    );
  }
  return { stdout: result.stdout, status: result.status ?? 0 };
}

/** Load-and-validate via the checker; returns its parameter count. */
export function validateWithPrimary(modelPath: string): number {
  const { stdout } = run(["params", modelPath]);
  const count = Number(stdout.trim());
  if (!Number.isInteger(count)) {
    throw new Error(`unexpected params output: ${stdout.trim()}`);
  }
  return count;
}

/** Exact-evaluator outputs for a batch of input vectors. */
export function evalWithPrimary(modelPath: string, inputs: number[][]): number[][] {
  const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "nnequiv-frontend-"));
  const inputsPath = path.join(tmp, "inputs.txt");
  try {
    const lines = inputs.map((vector) => vector.map((v) => v.toString()).join(","));
    fs.writeFileSync(inputsPath, lines.join("\n") + "\n", "utf8");
    const { stdout } = run(["eval", modelPath, "--input-file", inputsPath]);
    const rows = stdout
      .trim()
      .split("\n")
      .map((line) => line.split(",").map(Number));
    if (rows.length !== inputs.length) {
      throw new Error(`expected ${inputs.length} output rows, got ${rows.length}`);
    }
    return rows;
  } finally {
    fs.rmSync(tmp, { recursive: true, force: true });
  }
}
