/**
 * The eps,lstm_accuracy interchange file that the sanitizer toolkit merges
 * into its reconstruction tables. Budgets and accuracies are written with
 * JavaScript's shortest round-trip number formatting; flagged (diverged)
 * accuracies become empty cells.
 */

import { readFileSync, renameSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

export interface ResultRow {
  eps: number;
  accuracy: number; // NaN marks a flagged result
}

export function emitResults(rows: ResultRow[], outPath: string): void {
  const lines = ["eps,lstm_accuracy"];
  for (const { eps, accuracy } of rows) {
    if (!Number.isFinite(eps) || eps <= 0) throw new Error(`budget must be positive, got ${eps}`);
    lines.push(`${eps},${Number.isNaN(accuracy) ? "" : accuracy}`);
  }
  const tmp = join(dirname(outPath), `.${process.pid}.${Date.now()}.csv.tmp`);
  writeFileSync(tmp, lines.join("\n") + "\n", "utf8");
  renameSync(tmp, outPath);
}

export function readResults(path: string): ResultRow[] {
  const lines = readFileSync(path, "utf8").trim().split(/\r?\n/u);
  if (lines[0] !== "eps,lstm_accuracy") {
    throw new Error(`${path}: expected header eps,lstm_accuracy, got ${lines[0]}`);
  }
  return lines.slice(1).map((line) => {
    const [eps, acc] = line.split(",");
    return { eps: Number(eps), accuracy: acc === "" ? NaN : Number(acc) };
  });
}

/** Reads the reconstruction table the primary toolkit writes (for tests). */
export function readReconstructionTable(
  path: string,
): { eps: number; viterbi: number; bound: number }[] {
  const lines = readFileSync(path, "utf8").trim().split(/\r?\n/u);
  const header = lines[0].split(",");
  const col = (name: string) => {
    const idx = header.indexOf(name);
    if (idx < 0) throw new Error(`${path}: missing column ${name}`);
    return idx;
  };
  const [ie, iv, ib] = [col("eps"), col("viterbi_accuracy"), col("bdp_bound")];
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    return { eps: Number(cells[ie]), viterbi: Number(cells[iv]), bound: Number(cells[ib]) };
  });
}
