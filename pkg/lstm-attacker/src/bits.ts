/**
 * Single-line bit-series files: one '0'/'1' character per bit, newline
 * terminated. The same format the sanitizer toolkit reads and writes.
 */

import { readFileSync, renameSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

export function readBits(path: string): Uint8Array {
  const text = readFileSync(path, "utf8").trim();
  if (text.length === 0 || /[^01]/.test(text)) {
    throw new Error(`${path}: expected a single line of 0/1 characters`);
  }
  const bits = new Uint8Array(text.length);
  for (let i = 0; i < text.length; i++) {
    bits[i] = text.charCodeAt(i) - 48;
  }
  return bits;
}

export function writeBits(path: string, bits: Uint8Array): void {
  let line = "";
  for (const b of bits) {
    if (b !== 0 && b !== 1) throw new Error(`bit series may only contain 0 and 1, got ${b}`);
    line += b ? "1" : "0";
  }
  const tmp = join(dirname(path), `.${process.pid}.${Date.now()}.bits.tmp`);
  writeFileSync(tmp, line + "\n", "utf8");
  renameSync(tmp, path);
}
