import { parseArgs } from "node:util";

import { loadConfig } from "./config";
import { TrainerError } from "./errors";
import { predictBatch } from "./predict";
import { finetune } from "./trainer";

const USAGE = `usage:
  finetune --train FILE --val FILE --config FILE --out DIR
  predict --model DIR --in FILE --out FILE`;

function usageError(message: string): number {
  process.stderr.write(`${message}\n${USAGE}\n`);
  return 2;
}

function requireOption(values: Record<string, unknown>, name: string): string | undefined {
  const value = values[name];
  if (typeof value !== "string" || value.length === 0) {
    return undefined;
  }
  return value;
}

export function runCli(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "finetune") {
      let values: Record<string, unknown>;
      try {
        ({ values } = parseArgs({
          args: rest,
          options: {
            train: { type: "string" },
            val: { type: "string" },
            config: { type: "string" },
            out: { type: "string" },
          },
        }));
      } catch (err) {
        return usageError((err as Error).message);
      }
      const train = requireOption(values, "train");
      const val = requireOption(values, "val");
      const configPath = requireOption(values, "config");
      const out = requireOption(values, "out");
      if (!train || !val || !configPath || !out) {
        return usageError("finetune requires --train, --val, --config, and --out");
      }
      const config = loadConfig(configPath);
      const metrics = finetune(train, val, config, out);
      const best = metrics.epochs[metrics.best_epoch - 1];
      process.stdout.write(
        `trained on ${metrics.n_train} records, labels [${metrics.label_set.join(", ")}], ` +
          `best epoch ${metrics.best_epoch} ` +
          `(val macro-F1 ${best ? best.val_macro_f1.toFixed(4) : "n/a"}) -> ${out}\n`,
      );
      return 0;
    }
    if (command === "predict") {
      let values: Record<string, unknown>;
      try {
        ({ values } = parseArgs({
          args: rest,
          options: {
            model: { type: "string" },
            in: { type: "string" },
            out: { type: "string" },
          },
        }));
      } catch (err) {
        return usageError((err as Error).message);
      }
      const model = requireOption(values, "model");
      const input = requireOption(values, "in");
      const out = requireOption(values, "out");
      if (!model || !input || !out) {
        return usageError("predict requires --model, --in, and --out");
      }
      const count = predictBatch(model, input, out);
      process.stdout.write(`predicted ${count} record(s) -> ${out}\n`);
      return 0;
    }
    return usageError(
      command ? `unknown command '${command}'` : "a command is required",
    );
  } catch (err) {
    if (err instanceof TrainerError || (err as NodeJS.ErrnoException)?.code !== undefined) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exitCode = runCli(process.argv.slice(2));
}
