/**
 * Windowed training rows: the input is a window of sanitized bits and the
 * label is the true (hidden) bit at the window's center, so a series of
 * length n yields n - w + 1 rows.
 */

export interface WindowedDataset {
  /** odd window width */
  window: number;
  /** number of rows */
  rows: number;
  /** row-major window bits, length rows * window */
  inputs: Int32Array;
  /** center-bit labels, length rows */
  labels: Uint8Array;
}

export function buildWindows(sanitized: Uint8Array, truth: Uint8Array, window: number): WindowedDataset {
  if (sanitized.length !== truth.length) {
    throw new Error(
      `series lengths differ: sanitized ${sanitized.length} vs truth ${truth.length}`,
    );
  }
  if (window % 2 === 0 || window < 1) {
    throw new Error(`window must be odd and positive, got ${window}`);
  }
  if (window > sanitized.length) {
    throw new Error(`window ${window} exceeds series length ${sanitized.length}`);
  }
  const rows = sanitized.length - window + 1;
  const half = (window - 1) / 2;
  const inputs = new Int32Array(rows * window);
  const labels = new Uint8Array(rows);
  for (let t = 0; t < rows; t++) {
    for (let j = 0; j < window; j++) {
      inputs[t * window + j] = sanitized[t + j];
    }
    labels[t] = truth[t + half];
  }
  return { window, rows, inputs, labels };
}
