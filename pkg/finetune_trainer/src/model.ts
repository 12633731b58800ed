import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { TrainerError } from "./errors";
import { Rng } from "./rng";

export interface ModelDims {
  vocab_size: number;
  embed_dim: number;
  hidden_dim: number;
  num_labels: number;
}

export interface ParamSpec {
  key: "embedding" | "w1" | "b1" | "w2" | "b2";
  shape: number[];
  decay: boolean; // biases are excluded from weight decay
}

const WEIGHTS_FILE = "weights.json";

/**
 * Mean-pooled embedding-bag classifier: token embeddings averaged over the
 * sequence, one hidden ReLU layer, softmax output.
 *
 * Master weights live in float64 arrays (the source of truth for updates,
 * evaluation, prediction, and persistence); float32 mirrors feed the
 * gradient computation during training.
 */
export class BagClassifier {
  readonly dims: ModelDims;
  readonly params: Record<string, Float64Array>;

  private constructor(dims: ModelDims, params: Record<string, Float64Array>) {
    this.dims = dims;
    this.params = params;
  }

  paramSpecs(): ParamSpec[] {
    const { vocab_size, embed_dim, hidden_dim, num_labels } = this.dims;
    return [
      { key: "embedding", shape: [vocab_size, embed_dim], decay: true },
      { key: "w1", shape: [embed_dim, hidden_dim], decay: true },
      { key: "b1", shape: [hidden_dim], decay: false },
      { key: "w2", shape: [hidden_dim, num_labels], decay: true },
      { key: "b2", shape: [num_labels], decay: false },
    ];
  }

  static init(dims: ModelDims, seed: number): BagClassifier {
    const rng = new Rng(seed);
    const model = new BagClassifier(dims, {});
    for (const spec of model.paramSpecs()) {
      const size = spec.shape.reduce((a, b) => a * b, 1);
      const values = new Float64Array(size);
      if (spec.key === "embedding") {
        for (let i = 0; i < size; i++) values[i] = rng.uniform(-0.05, 0.05);
      } else if (spec.decay) {
        const bound = Math.sqrt(6 / (spec.shape[0] + spec.shape[1]));
        for (let i = 0; i < size; i++) values[i] = rng.uniform(-bound, bound);
      }
      model.params[spec.key] = values;
    }
    return model;
  }

  /** Double-precision forward pass: raw class scores for one sequence. */
  logits(ids: number[]): Float64Array {
    const { embed_dim, hidden_dim, num_labels } = this.dims;
    const embedding = this.params.embedding;
    const pooled = new Float64Array(embed_dim);
    for (const id of ids) {
      const base = id * embed_dim;
      for (let j = 0; j < embed_dim; j++) pooled[j] += embedding[base + j];
    }
    if (ids.length > 0) {
      for (let j = 0; j < embed_dim; j++) pooled[j] /= ids.length;
    }
    const w1 = this.params.w1;
    const b1 = this.params.b1;
    const hidden = new Float64Array(hidden_dim);
    for (let j = 0; j < hidden_dim; j++) {
      let acc = b1[j];
      for (let i = 0; i < embed_dim; i++) acc += pooled[i] * w1[i * hidden_dim + j];
      hidden[j] = acc > 0 ? acc : 0;
    }
    const w2 = this.params.w2;
    const b2 = this.params.b2;
    const out = new Float64Array(num_labels);
    for (let k = 0; k < num_labels; k++) {
      let acc = b2[k];
      for (let j = 0; j < hidden_dim; j++) acc += hidden[j] * w2[j * num_labels + k];
      out[k] = acc;
    }
    return out;
  }

  /** Stable softmax over the double-precision logits; sums to 1 in doubles. */
  predictProba(ids: number[]): Float64Array {
    const logits = this.logits(ids);
    let max = -Infinity;
    for (const v of logits) max = Math.max(max, v);
    let sum = 0;
    const out = new Float64Array(logits.length);
    for (let k = 0; k < logits.length; k++) {
      out[k] = Math.exp(logits[k] - max);
      sum += out[k];
    }
    for (let k = 0; k < out.length; k++) out[k] /= sum;
    return out;
  }

  snapshot(): Record<string, Float64Array> {
    const out: Record<string, Float64Array> = {};
    for (const [key, values] of Object.entries(this.params)) {
      out[key] = new Float64Array(values);
    }
    return out;
  }

  restore(snapshot: Record<string, Float64Array>): void {
    for (const [key, values] of Object.entries(snapshot)) {
      this.params[key].set(values);
    }
  }

  /** Float32 training mirrors; call refreshVariables after each update. */
  makeVariables(): Record<string, tf.Variable> {
    const out: Record<string, tf.Variable> = {};
    for (const spec of this.paramSpecs()) {
      out[spec.key] = tf.variable(
        tf.tensor(Array.from(this.params[spec.key]), spec.shape, "float32"),
      );
    }
    return out;
  }

  refreshVariables(variables: Record<string, tf.Variable>): void {
    tf.tidy(() => {
      for (const spec of this.paramSpecs()) {
        variables[spec.key].assign(
          tf.tensor(Array.from(this.params[spec.key]), spec.shape, "float32"),
        );
      }
    });
  }

  save(dir: string): void {
    const payload = {
      dims: this.dims,
      embedding: Array.from(this.params.embedding),
      w1: Array.from(this.params.w1),
      b1: Array.from(this.params.b1),
      w2: Array.from(this.params.w2),
      b2: Array.from(this.params.b2),
    };
    fs.writeFileSync(path.join(dir, WEIGHTS_FILE), JSON.stringify(payload));
  }

  static load(dir: string): BagClassifier {
    const file = path.join(dir, WEIGHTS_FILE);
    let payload: {
      dims: ModelDims;
      embedding: number[];
      w1: number[];
      b1: number[];
      w2: number[];
      b2: number[];
    };
    try {
      payload = JSON.parse(fs.readFileSync(file, "utf-8"));
    } catch (err) {
      throw new TrainerError(`cannot read model weights ${file}: ${(err as Error).message}`);
    }
    const model = new BagClassifier(payload.dims, {});
    for (const spec of model.paramSpecs()) {
      const size = spec.shape.reduce((a, b) => a * b, 1);
      const values = payload[spec.key];
      if (!Array.isArray(values) || values.length !== size) {
        throw new TrainerError(`corrupt model weights ${file}: bad '${spec.key}' payload`);
      }
      model.params[spec.key] = Float64Array.from(values);
    }
    return model;
  }
}
