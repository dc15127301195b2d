/**
 * Command line: train the windowed LSTM attacker against one or more
 * sanitized series and emit the eps,lstm_accuracy CSV.
 *
 *   lstm-attack --truth truth.bits --pair 1:sanitized_eps1.bits \
 *       --pair 2:sanitized_eps2.bits --out lstm.csv --epochs 10
 *
 * A single run can also be given as --eps 1.5 --sanitized z.bits. The
 * resolved configuration is echoed to stderr.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { readBits } from "./bits.js";
import { emitResults, type ResultRow } from "./csv.js";
import { DEFAULT_CONFIG, trainAndEvaluate } from "./train.js";
import { buildWindows } from "./windows.js";

interface Pair {
  eps: number;
  path: string;
}

function parsePair(text: string): Pair {
  const sep = text.indexOf(":");
  if (sep <= 0) throw new Error(`--pair expects eps:path, got ${text}`);
  const eps = Number(text.slice(0, sep));
  if (!Number.isFinite(eps) || eps <= 0) throw new Error(`bad budget in --pair ${text}`);
  return { eps, path: text.slice(sep + 1) };
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("truth", { type: "string", demandOption: true, describe: "true bit series" })
    .option("pair", { type: "string", array: true, describe: "eps:path of a sanitized series" })
    .option("sanitized", { type: "string", describe: "single sanitized series" })
    .option("eps", { type: "number", describe: "budget of --sanitized" })
    .option("out", { type: "string", demandOption: true, describe: "output CSV path" })
    .option("window", { type: "number", default: DEFAULT_CONFIG.window })
    .option("embedding", { type: "number", default: DEFAULT_CONFIG.embeddingDim })
    .option("hidden", { type: "number", default: DEFAULT_CONFIG.hidden })
    .option("epochs", { type: "number", default: DEFAULT_CONFIG.epochs })
    .option("batch", { type: "number", default: DEFAULT_CONFIG.batchSize })
    .option("lr", { type: "number", default: DEFAULT_CONFIG.learningRate })
    .option("folds", { type: "number", default: DEFAULT_CONFIG.folds })
    .option("seed", { type: "number", default: 0 })
    .strict()
    .parse();

  const pairs: Pair[] = (args.pair ?? []).map(parsePair);
  if (args.sanitized !== undefined || args.eps !== undefined) {
    if (args.sanitized === undefined || args.eps === undefined) {
      throw new Error("--sanitized and --eps must be given together");
    }
    pairs.push({ eps: args.eps, path: args.sanitized });
  }
  if (pairs.length === 0) throw new Error("nothing to do: give --pair or --sanitized/--eps");
  pairs.sort((a, b) => a.eps - b.eps);

  const config = {
    window: args.window,
    embeddingDim: args.embedding,
    hidden: args.hidden,
    epochs: args.epochs,
    batchSize: args.batch,
    learningRate: args.lr,
    folds: args.folds,
    seed: args.seed,
  };
  console.error(`lstm-attack config: ${JSON.stringify({ ...config, pairs, truth: args.truth })}`);

  const truth = readBits(args.truth);
  const rows: ResultRow[] = [];
  for (const { eps, path } of pairs) {
    const sanitized = readBits(path);
    const dataset = buildWindows(sanitized, truth, config.window);
    const result = await trainAndEvaluate(dataset, config);
    const accuracies = result.folds.map((f) => f.accuracy.toFixed(4)).join(" ");
    console.error(
      `eps=${eps}: fold accuracies [${accuracies}] mean=${result.mean.toFixed(4)}` +
        (result.diverged ? " DIVERGED" : ""),
    );
    rows.push({ eps, accuracy: result.diverged ? NaN : result.mean });
  }
  emitResults(rows, args.out);
  return 0;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.ts") || entry.endsWith("cli.js")) {
  main(hideBin(process.argv)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(`lstm-attack: ${err instanceof Error ? err.message : err}`);
      process.exit(2);
    },
  );
}
