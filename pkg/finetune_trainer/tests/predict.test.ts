import * as path from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { FINETUNE_DEFAULTS } from "../src/config";
import { readInterchange, writeInterchange } from "../src/interchange";
import { predictBatch } from "../src/predict";
import { finetune } from "../src/trainer";
import { separableRecords, tmpDir } from "./helpers";

let modelDir: string;

beforeAll(() => {
  const dir = tmpDir();
  const train = path.join(dir, "train.jsonl");
  const val = path.join(dir, "val.jsonl");
  writeInterchange(separableRecords("train", 10), train);
  writeInterchange(separableRecords("validation", 4), val);
  modelDir = path.join(dir, "model");
  finetune(train, val, { ...FINETUNE_DEFAULTS, epochs: 25, learning_rate: 0.05 }, modelDir);
});

describe("predictBatch", () => {
  it("fills predictions for every record, order preserved", () => {
    const dir = tmpDir();
    const input = separableRecords("test", 4);
    const inFile = path.join(dir, "in.jsonl");
    const outFile = path.join(dir, "out.jsonl");
    writeInterchange(input, inFile);
    expect(predictBatch(modelDir, inFile, outFile)).toBe(12);

    const out = readInterchange(outFile);
    expect(out.map((r) => r.claim_id)).toEqual(input.map((r) => r.claim_id));
    for (let i = 0; i < out.length; i++) {
      expect(out[i].predicted_label).toBeDefined();
      expect(out[i].probabilities).toBeDefined();
      // every other field is preserved
      expect(out[i].claim).toBe(input[i].claim);
      expect(out[i].evidence).toEqual(input[i].evidence);
      expect(out[i].gold_label).toBe(input[i].gold_label);
      expect(out[i].llm_label).toBe(input[i].llm_label);
      expect(out[i].flags).toEqual(input[i].flags);
    }
  });

  it("scores the separable task correctly after training", () => {
    const dir = tmpDir();
    const input = separableRecords("test", 4);
    const inFile = path.join(dir, "in.jsonl");
    const outFile = path.join(dir, "out.jsonl");
    writeInterchange(input, inFile);
    predictBatch(modelDir, inFile, outFile);
    const out = readInterchange(outFile);
    const correct = out.filter((r) => r.predicted_label === r.gold_label).length;
    expect(correct).toBe(out.length);
  });

  it("emits probabilities that sum to 1 with a consistent argmax", () => {
    const dir = tmpDir();
    const inFile = path.join(dir, "in.jsonl");
    const outFile = path.join(dir, "out.jsonl");
    writeInterchange(separableRecords("test", 2), inFile);
    predictBatch(modelDir, inFile, outFile);
    for (const record of readInterchange(outFile)) {
      const probs = record.probabilities!;
      const labels = Object.keys(probs);
      expect(labels).toEqual(["NEI", "Refuted", "Supported"]);
      const sum = labels.reduce((acc, label) => acc + probs[label], 0);
      expect(Math.abs(sum - 1)).toBeLessThanOrEqual(1e-6);
      const max = Math.max(...labels.map((label) => probs[label]));
      const least = labels.filter((label) => probs[label] === max).sort()[0];
      expect(record.predicted_label).toBe(least);
    }
  });

  it("accepts records without gold labels", () => {
    const dir = tmpDir();
    const inFile = path.join(dir, "in.jsonl");
    const outFile = path.join(dir, "out.jsonl");
    writeInterchange(separableRecords("test", 2, false), inFile);
    expect(predictBatch(modelDir, inFile, outFile)).toBe(6);
    for (const record of readInterchange(outFile)) {
      expect(record.gold_label).toBeUndefined();
      expect(record.predicted_label).toBeDefined();
    }
  });

  it("rejects gold labels outside the model's label set", () => {
    const dir = tmpDir();
    const twoDir = tmpDir();
    const train = path.join(twoDir, "train.jsonl");
    const val = path.join(twoDir, "val.jsonl");
    const twoClass = (split: "train" | "validation") =>
      separableRecords(split, 4).filter((r) => r.gold_label !== "NEI");
    writeInterchange(twoClass("train"), train);
    writeInterchange(twoClass("validation"), val);
    const twoClassModel = path.join(twoDir, "model");
    finetune(train, val, { ...FINETUNE_DEFAULTS, epochs: 1 }, twoClassModel);

    const inFile = path.join(dir, "in.jsonl");
    writeInterchange(separableRecords("test", 1), inFile);
    expect(() => predictBatch(twoClassModel, inFile, path.join(dir, "out.jsonl"))).toThrow(
      /label-set mismatch.*'NEI' outside the model's label set/,
    );
  });

  it("reports a missing model directory as a domain error", () => {
    const dir = tmpDir();
    const inFile = path.join(dir, "in.jsonl");
    writeInterchange(separableRecords("test", 1), inFile);
    expect(() =>
      predictBatch(path.join(dir, "no-model"), inFile, path.join(dir, "out.jsonl")),
    ).toThrow(/cannot read model config/);
  });
});
