/**
 * The reconstruction model and its 10-fold cross-validated evaluation.
 *
 * Architecture: embed each bit of the window in a small dense space, run the
 * window through an LSTM, apply a linear layer to the final state, squash
 * with a sigmoid, threshold at 0.5.  The embedding stage is a
 * time-distributed dense layer on the raw bit: for binary inputs an affine
 * map of the scalar spans exactly the same family as a 2-row embedding
 * table, and it avoids gather/scatter kernels the wasm backend lacks.
 *
 * Everything that could introduce nondeterminism is pinned: initializers
 * carry explicit seeds derived from (config.seed, fold), the single pre-fit
 * shuffle uses a seeded generator, fit() never reshuffles, folds are
 * contiguous blocks trained sequentially, and the wasm backend runs on one
 * thread.
 */

import { createRequire } from "node:module";

import * as tf from "@tensorflow/tfjs";

import type { WindowedDataset } from "./windows.js";

export interface AttackerConfig {
  window: number;
  embeddingDim: number;
  hidden: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  folds: number;
  seed: number;
}

export const DEFAULT_CONFIG: AttackerConfig = {
  window: 11,
  embeddingDim: 4,
  hidden: 16,
  epochs: 20,
  batchSize: 256,
  learningRate: 8e-4,
  folds: 10,
  seed: 0,
};

export interface FoldResult {
  accuracy: number;
  /** final training loss was not finite */
  diverged: boolean;
}

export interface CvResult {
  folds: FoldResult[];
  mean: number;
  diverged: boolean;
}

let backendReady: Promise<string> | undefined;

/** Selects the wasm backend (single-threaded) once, falling back to the default. */
export function ensureBackend(): Promise<string> {
  backendReady ??= (async () => {
    try {
      const wasm = await import("@tensorflow/tfjs-backend-wasm");
      const require = createRequire(import.meta.url);
      const dist = require.resolve("@tensorflow/tfjs-backend-wasm").replace(/dist.*/u, "dist/");
      wasm.setWasmPaths(dist);
      wasm.setThreadsCount(1);
      await tf.setBackend("wasm");
    } catch {
      // pure-JS backend works everywhere, just slower
    }
    await tf.ready();
    tf.enableProdMode();
    return tf.getBackend();
  })();
  return backendReady;
}

export function validateConfig(config: AttackerConfig): void {
  if (config.folds < 2) throw new Error(`fold count must be >= 2, got ${config.folds}`);
  if (config.embeddingDim < 1) {
    throw new Error(`embedding dimension must be >= 1, got ${config.embeddingDim}`);
  }
  if (config.window % 2 === 0 || config.window < 1) {
    throw new Error(`window must be odd and positive, got ${config.window}`);
  }
}

/** Deterministic 32-bit mixer (mulberry32) for shuffling. */
export function seededUniform(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function shuffledIndices(count: number, seed: number): Int32Array {
  const order = new Int32Array(count);
  for (let i = 0; i < count; i++) order[i] = i;
  const next = seededUniform(seed);
  for (let i = count - 1; i > 0; i--) {
    const j = Math.floor(next() * (i + 1));
    const tmp = order[i];
    order[i] = order[j];
    order[j] = tmp;
  }
  return order;
}

function buildModel(config: AttackerConfig, seed: number): tf.LayersModel {
  const model = tf.sequential();
  model.add(
    tf.layers.timeDistributed({
      layer: tf.layers.dense({
        units: config.embeddingDim,
        kernelInitializer: tf.initializers.glorotUniform({ seed }),
      }),
      inputShape: [config.window, 1],
    }),
  );
  model.add(
    tf.layers.lstm({
      units: config.hidden,
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
      recurrentInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
    }),
  );
  model.add(
    tf.layers.dense({
      units: 1,
      activation: "sigmoid",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 3 }),
    }),
  );
  model.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: "binaryCrossentropy",
  });
  return model;
}

function gather(dataset: WindowedDataset, rows: ArrayLike<number>): [tf.Tensor3D, tf.Tensor2D] {
  const w = dataset.window;
  const xs = new Float32Array(rows.length * w);
  const ys = new Float32Array(rows.length);
  for (let k = 0; k < rows.length; k++) {
    const r = rows[k];
    for (let j = 0; j < w; j++) xs[k * w + j] = dataset.inputs[r * w + j];
    ys[k] = dataset.labels[r];
  }
  return [
    tf.tensor3d(xs, [rows.length, w, 1], "float32"),
    tf.tensor2d(ys, [rows.length, 1], "float32"),
  ];
}

/** Contiguous fold boundaries: fold k covers [bounds[k], bounds[k+1]). */
export function foldBounds(rows: number, folds: number): number[] {
  const bounds = [0];
  for (let k = 1; k <= folds; k++) bounds.push(Math.floor((rows * k) / folds));
  return bounds;
}

export async function trainAndEvaluate(
  dataset: WindowedDataset,
  config: AttackerConfig = DEFAULT_CONFIG,
): Promise<CvResult> {
  validateConfig(config);
  if (dataset.rows < config.folds) {
    throw new Error(`need at least ${config.folds} rows, got ${dataset.rows}`);
  }
  await ensureBackend();
  const bounds = foldBounds(dataset.rows, config.folds);
  const folds: FoldResult[] = [];
  for (let fold = 0; fold < config.folds; fold++) {
    const lo = bounds[fold];
    const hi = bounds[fold + 1];
    const trainRows: number[] = [];
    for (let r = 0; r < dataset.rows; r++) {
      if (r < lo || r >= hi) trainRows.push(r);
    }
    const order = shuffledIndices(trainRows.length, config.seed * 1009 + fold);
    const shuffled = Array.from(order, (i) => trainRows[i]);
    const [trainX, trainY] = gather(dataset, shuffled);
    const valRows = Array.from({ length: hi - lo }, (_, k) => lo + k);
    const [valX, valY] = gather(dataset, valRows);
    const model = buildModel(config, config.seed * 7919 + fold * 17);
    try {
      const history = await model.fit(trainX, trainY, {
        epochs: config.epochs,
        batchSize: config.batchSize,
        shuffle: false,
        verbose: 0,
      });
      const losses = history.history.loss as number[];
      const diverged = !Number.isFinite(losses[losses.length - 1]);
      const accuracy = tf.tidy(() => {
        const probs = model.predict(valX) as tf.Tensor;
        const guesses = probs.greater(0.5).cast("float32");
        return guesses.equal(valY).mean().dataSync()[0];
      });
      folds.push({ accuracy, diverged });
    } finally {
      model.dispose();
      trainX.dispose();
      trainY.dispose();
      valX.dispose();
      valY.dispose();
    }
  }
  const mean = folds.reduce((acc, f) => acc + f.accuracy, 0) / folds.length;
  return { folds, mean, diverged: folds.some((f) => f.diverged) };
}
