/**
 * Normalize the lane-keeping controller dataset into plain CSV.
 *
 * The source text layout is ambiguous between "one sample per row" (N x 7)
 * and "one variable per row" (7 x N); the converter detects the orientation
 * by arity -- six inputs plus one target -- and records which was assumed.
 * Pickled array sources are not readable here; convert them to the
 * comma-delimited text layout first.
 */

import * as fs from "fs";

export const MPC_INPUTS = 6;
export const MPC_COLUMNS = MPC_INPUTS + 1;

export interface ConversionResult {
  samples: number;
  orientation: "rows-are-samples" | "rows-are-variables";
  outPath: string;
}

function parseDelimitedText(text: string): string[][] {
  const rows: string[][] = [];
  for (const line of text.split(/\r?\n/)) {
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    rows.push(trimmed.split(",").map((cell) => cell.trim()));
  }
  return rows;
}

function assertNumeric(rows: string[][]): void {
  rows.forEach((row, i) => {
    row.forEach((cell, j) => {
      if (cell === "" || Number.isNaN(Number(cell))) {
        throw new Error(`row ${i + 1}, column ${j + 1}: '${cell}' is not numeric`);
      }
    });
  });
}

export function detectOrientation(
  rows: string[][]
): "rows-are-samples" | "rows-are-variables" {
  if (rows.length === 0) {
    throw new Error("dataset is empty");
  }
  const widths = new Set(rows.map((row) => row.length));
  if (widths.size !== 1) {
    throw new Error(
      `rows have inconsistent arity (${[...widths].sort((a, b) => a - b).join(", ")})`
    );
  }
  const width = rows[0].length;
  if (width === MPC_COLUMNS && rows.length === MPC_COLUMNS) {
    // 7 x 7 is genuinely ambiguous; samples-per-row is the common layout.
    return "rows-are-samples";
  }
  if (width === MPC_COLUMNS) {
    return "rows-are-samples";
  }
  if (rows.length === MPC_COLUMNS) {
    return "rows-are-variables";
  }
  throw new Error(
    `expected ${MPC_COLUMNS} columns per sample or ${MPC_COLUMNS} variable rows;` +
      ` got ${rows.length} rows of ${width} values`
  );
}

export function convertMpcDataset(sourcePath: string, outPath: string): ConversionResult {
  if (sourcePath.endsWith(".pkl")) {
    throw new Error(
      "pickled array sources are not supported by this converter;" +
        " export the comma-delimited text layout instead"
    );
  }
  const rows = parseDelimitedText(fs.readFileSync(sourcePath, "utf8"));
  const orientation = detectOrientation(rows);
  assertNumeric(rows);
  const samples = orientation === "rows-are-samples" ? rows : transposeRows(rows);
  const lines = samples.map((row) => row.join(","));
  fs.writeFileSync(outPath, lines.join("\n") + "\n", "utf8");
  return { samples: samples.length, orientation, outPath };
}

function transposeRows(rows: string[][]): string[][] {
  return rows[0].map((_, col) => rows.map((row) => row[col]));
}
