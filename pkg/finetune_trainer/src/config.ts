import * as fs from "node:fs";

import { SchemaError, TrainerError } from "./errors";

/** Training hyperparameters. Field names match their serialized form. */
export interface FinetuneConfig {
  base_model_name: string;
  learning_rate: number;
  train_batch: number;
  eval_batch: number;
  epochs: number;
  weight_decay: number;
  grad_accum_steps: number;
  selection_metric: "macro-F1";
  seed: number;
}

export const FINETUNE_DEFAULTS: FinetuneConfig = {
  base_model_name: "tiny",
  learning_rate: 2e-5,
  train_batch: 8,
  eval_batch: 8,
  epochs: 5,
  weight_decay: 0.2,
  grad_accum_steps: 2,
  selection_metric: "macro-F1",
  seed: 42,
};

/** Architecture sizes selected by base_model_name. */
export interface Preset {
  vocab_size: number;
  embed_dim: number;
  hidden_dim: number;
  max_len: number;
}

export const PRESETS: Record<string, Preset> = {
  tiny: { vocab_size: 2000, embed_dim: 16, hidden_dim: 16, max_len: 512 },
  small: { vocab_size: 8000, embed_dim: 32, hidden_dim: 32, max_len: 512 },
  base: { vocab_size: 20000, embed_dim: 64, hidden_dim: 64, max_len: 512 },
};

/**
 * Published-setup names accepted as base_model_name. Full-size transformer
 * fine-tuning is out of scope here, so these map to the largest built-in
 * stand-in and exist so configs written against the published setups load.
 */
export const PRESET_ALIASES: Record<string, string> = {
  "deberta-v3-large": "base",
  "bert-base": "base",
  pubmedbert: "base",
};

export function resolvePreset(baseModelName: string): Preset {
  const key = PRESET_ALIASES[baseModelName] ?? baseModelName;
  const preset = PRESETS[key];
  if (!preset) {
    const known = [...Object.keys(PRESETS), ...Object.keys(PRESET_ALIASES)].sort();
    throw new TrainerError(
      `unknown base_model_name '${baseModelName}' (choose from ${known.join(", ")})`,
    );
  }
  return preset;
}

const INT_KEYS = new Set(["train_batch", "eval_batch", "epochs", "grad_accum_steps", "seed"]);
const NUMBER_KEYS = new Set(["learning_rate", "weight_decay", ...INT_KEYS]);
const STRING_KEYS = new Set(["base_model_name", "selection_metric"]);

export function validateConfig(config: FinetuneConfig): void {
  if (!(config.learning_rate > 0)) {
    throw new TrainerError(`learning_rate must be > 0, got ${config.learning_rate}`);
  }
  if (config.epochs < 1) {
    throw new TrainerError(`epochs must be >= 1, got ${config.epochs}`);
  }
  if (config.train_batch < 1 || config.eval_batch < 1) {
    throw new TrainerError("train_batch and eval_batch must be >= 1");
  }
  if (config.weight_decay < 0) {
    throw new TrainerError(`weight_decay must be >= 0, got ${config.weight_decay}`);
  }
  if (config.grad_accum_steps < 1) {
    throw new TrainerError(`grad_accum_steps must be >= 1, got ${config.grad_accum_steps}`);
  }
  if (config.selection_metric !== "macro-F1") {
    throw new TrainerError(
      `selection_metric is fixed to 'macro-F1', got '${config.selection_metric}'`,
    );
  }
  resolvePreset(config.base_model_name);
}

/** Parse a JSON config file and overlay it on the defaults. */
export function loadConfig(path: string): FinetuneConfig {
  let raw: string;
  try {
    raw = fs.readFileSync(path, "utf-8");
  } catch (err) {
    throw new TrainerError(`cannot read config file ${path}: ${(err as Error).message}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (err) {
    throw new SchemaError(`${path}: invalid JSON: ${(err as Error).message}`);
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new SchemaError(`${path}: config must be a JSON object`);
  }
  const config: FinetuneConfig = { ...FINETUNE_DEFAULTS };
  for (const [key, value] of Object.entries(parsed as Record<string, unknown>)) {
    if (!(key in FINETUNE_DEFAULTS)) {
      throw new SchemaError(`${path}: unknown config key '${key}'`);
    }
    if (NUMBER_KEYS.has(key)) {
      if (typeof value !== "number" || !Number.isFinite(value)) {
        throw new SchemaError(`${path}: config key '${key}' expects a number, got ${JSON.stringify(value)}`);
      }
      if (INT_KEYS.has(key) && !Number.isInteger(value)) {
        throw new SchemaError(`${path}: config key '${key}' expects an integer, got ${value}`);
      }
    } else if (STRING_KEYS.has(key) && typeof value !== "string") {
      throw new SchemaError(`${path}: config key '${key}' expects a string, got ${JSON.stringify(value)}`);
    }
    (config as unknown as Record<string, unknown>)[key] = value;
  }
  validateConfig(config);
  return config;
}
