import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { FinetuneConfig, resolvePreset } from "./config";
import { TrainerError } from "./errors";
import { readInterchange, recordText, VerdictRecord } from "./interchange";
import { macroF1 } from "./metrics";
import { BagClassifier } from "./model";
import { Rng } from "./rng";
import { Tokenizer } from "./tokenizer";

export interface EpochEntry {
  epoch: number;
  train_loss: number;
  val_macro_f1: number;
}

export interface TrainMetrics {
  config: FinetuneConfig;
  label_set: string[];
  n_train: number;
  n_val: number;
  best_epoch: number;
  epochs: EpochEntry[];
}

const ADAM_BETA1 = 0.9;
const ADAM_BETA2 = 0.999;
const ADAM_EPS = 1e-8;

interface Example {
  ids: number[];
  label: number;
}

function requireGold(records: VerdictRecord[], which: string): void {
  for (const record of records) {
    if (record.gold_label === undefined) {
      throw new TrainerError(`${which} record '${record.claim_id}' has no gold_label`);
    }
  }
}

/** Decoupled-weight-decay Adam over float64 master weights. */
class AdamW {
  private readonly m: Record<string, Float64Array> = {};
  private readonly v: Record<string, Float64Array> = {};
  private step = 0;

  constructor(
    private readonly lr: number,
    private readonly weightDecay: number,
  ) {}

  apply(model: BagClassifier, grads: Record<string, Float64Array>): void {
    this.step += 1;
    const correction1 = 1 - Math.pow(ADAM_BETA1, this.step);
    const correction2 = 1 - Math.pow(ADAM_BETA2, this.step);
    for (const spec of model.paramSpecs()) {
      const weights = model.params[spec.key];
      const grad = grads[spec.key];
      let m = this.m[spec.key];
      let v = this.v[spec.key];
      if (!m) {
        m = this.m[spec.key] = new Float64Array(weights.length);
        v = this.v[spec.key] = new Float64Array(weights.length);
      }
      for (let i = 0; i < weights.length; i++) {
        const g = grad[i];
        m[i] = ADAM_BETA1 * m[i] + (1 - ADAM_BETA1) * g;
        v[i] = ADAM_BETA2 * v[i] + (1 - ADAM_BETA2) * g * g;
        const mHat = m[i] / correction1;
        const vHat = v[i] / correction2;
        let update = mHat / (Math.sqrt(vHat) + ADAM_EPS);
        if (spec.decay) update += this.weightDecay * weights[i];
        weights[i] -= this.lr * update;
      }
    }
  }
}

function microBatchGrads(
  variables: Record<string, tf.Variable>,
  examples: Example[],
  embedDim: number,
  numLabels: number,
): { loss: number; grads: Record<string, Float64Array> } {
  const varList = Object.values(variables);
  const nameToKey = new Map(Object.entries(variables).map(([key, v]) => [v.name, key]));
  const { value, grads } = tf.variableGrads(
    () =>
      tf.tidy(() => {
        const pooled = tf.stack(
          examples.map((example) =>
            example.ids.length
              ? tf.gather(variables.embedding, tf.tensor1d(example.ids, "int32")).mean(0)
              : tf.zeros([embedDim]),
          ),
        );
        const hidden = pooled.matMul(variables.w1 as tf.Tensor2D).add(variables.b1).relu();
        const logits = hidden.matMul(variables.w2 as tf.Tensor2D).add(variables.b2);
        const oneHot = tf.oneHot(
          tf.tensor1d(examples.map((example) => example.label), "int32"),
          numLabels,
        );
        const logProb = tf.logSoftmax(logits);
        return tf.neg(tf.sum(tf.mul(oneHot, logProb), -1)).mean() as tf.Scalar;
      }),
    varList,
  );
  const out: Record<string, Float64Array> = {};
  for (const [name, tensor] of Object.entries(grads)) {
    const key = nameToKey.get(name);
    if (key !== undefined) out[key] = Float64Array.from(tensor.dataSync());
  }
  const loss = value.dataSync()[0];
  value.dispose();
  tf.dispose(grads);
  return { loss, grads: out };
}

/**
 * Train on interchange records and save the best-validation checkpoint.
 *
 * Input text per record is claim [SEP] evidence [SEP] justification; the
 * checkpoint kept is the epoch with the highest validation macro-F1
 * (earliest wins ties). Returns the metrics written to metrics.json.
 */
export function finetune(
  trainPath: string,
  valPath: string,
  config: FinetuneConfig,
  outDir: string,
): TrainMetrics {
  const trainRecords = readInterchange(trainPath);
  const valRecords = readInterchange(valPath);
  if (trainRecords.length === 0) throw new TrainerError(`no records in ${trainPath}`);
  requireGold(trainRecords, "train");
  requireGold(valRecords, "validation");

  const labelSet = [...new Set(trainRecords.map((record) => record.gold_label!))].sort();
  if (labelSet.length < 2) {
    throw new TrainerError(`train data contains a single class '${labelSet[0]}'`);
  }
  for (const record of valRecords) {
    if (!labelSet.includes(record.gold_label!)) {
      throw new TrainerError(
        `validation record '${record.claim_id}' has gold_label '${record.gold_label}' ` +
          `absent from the train label set [${labelSet.join(", ")}]`,
      );
    }
  }

  const preset = resolvePreset(config.base_model_name);
  const tokenizer = Tokenizer.fit(
    trainRecords.map(recordText),
    preset.vocab_size,
    preset.max_len,
  );
  const toExample = (record: VerdictRecord): Example => ({
    ids: tokenizer.encode(recordText(record)),
    label: labelSet.indexOf(record.gold_label!),
  });
  const train = trainRecords.map(toExample);
  const val = valRecords.map(toExample);

  const dims = {
    vocab_size: tokenizer.vocabSize,
    embed_dim: preset.embed_dim,
    hidden_dim: preset.hidden_dim,
    num_labels: labelSet.length,
  };
  const model = BagClassifier.init(dims, config.seed);
  const optimizer = new AdamW(config.learning_rate, config.weight_decay);
  const rng = new Rng(config.seed);
  const variables = model.makeVariables();

  const evaluate = (): number => {
    const gold = valRecords.map((record) => record.gold_label!);
    const predicted = val.map((example) => {
      const probs = model.predictProba(example.ids);
      let best = 0;
      for (let k = 1; k < probs.length; k++) if (probs[k] > probs[best]) best = k;
      return labelSet[best];
    });
    return macroF1(gold, predicted, labelSet);
  };

  const epochs: EpochEntry[] = [];
  let bestF1 = -Infinity;
  let bestEpoch = 0;
  let bestWeights = model.snapshot();

  try {
    for (let epoch = 1; epoch <= config.epochs; epoch++) {
      const order = train.map((_, i) => i);
      rng.shuffle(order);
      const microBatches: Example[][] = [];
      for (let start = 0; start < order.length; start += config.train_batch) {
        microBatches.push(
          order.slice(start, start + config.train_batch).map((i) => train[i]),
        );
      }
      let lossSum = 0;
      for (let group = 0; group < microBatches.length; group += config.grad_accum_steps) {
        const micros = microBatches.slice(group, group + config.grad_accum_steps);
        model.refreshVariables(variables);
        const accumulated: Record<string, Float64Array> = {};
        for (const micro of micros) {
          const { loss, grads } = microBatchGrads(
            variables,
            micro,
            dims.embed_dim,
            dims.num_labels,
          );
          lossSum += loss;
          for (const [key, grad] of Object.entries(grads)) {
            const slot = (accumulated[key] ??= new Float64Array(grad.length));
            for (let i = 0; i < grad.length; i++) slot[i] += grad[i];
          }
        }
        for (const spec of model.paramSpecs()) {
          const slot = (accumulated[spec.key] ??= new Float64Array(
            model.params[spec.key].length,
          ));
          for (let i = 0; i < slot.length; i++) slot[i] /= micros.length;
        }
        optimizer.apply(model, accumulated);
      }
      const valF1 = evaluate();
      epochs.push({
        epoch,
        train_loss: lossSum / Math.max(1, microBatches.length),
        val_macro_f1: valF1,
      });
      if (valF1 > bestF1) {
        bestF1 = valF1;
        bestEpoch = epoch;
        bestWeights = model.snapshot();
      }
    }
  } finally {
    for (const variable of Object.values(variables)) variable.dispose();
  }
  model.restore(bestWeights);

  fs.mkdirSync(outDir, { recursive: true });
  model.save(outDir);
  tokenizer.save(path.join(outDir, "vocab.json"));
  const metrics: TrainMetrics = {
    config,
    label_set: labelSet,
    n_train: trainRecords.length,
    n_val: valRecords.length,
    best_epoch: bestEpoch,
    epochs,
  };
  fs.writeFileSync(
    path.join(outDir, "config.json"),
    JSON.stringify(
      { format_version: 1, config, label_set: labelSet, preset, best_epoch: bestEpoch },
      null,
      2,
    ),
  );
  fs.writeFileSync(path.join(outDir, "metrics.json"), JSON.stringify(metrics, null, 2));
  return metrics;
}
