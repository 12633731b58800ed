import * as fs from "node:fs";
import * as path from "node:path";

import { TrainerError } from "./errors";
import { Label, readInterchange, recordText, writeInterchange } from "./interchange";
import { BagClassifier } from "./model";
import { Tokenizer } from "./tokenizer";

interface ModelHeader {
  format_version: number;
  label_set: string[];
}

function loadHeader(modelDir: string): ModelHeader {
  const file = path.join(modelDir, "config.json");
  let header: ModelHeader;
  try {
    header = JSON.parse(fs.readFileSync(file, "utf-8"));
  } catch (err) {
    throw new TrainerError(`cannot read model config ${file}: ${(err as Error).message}`);
  }
  if (!Array.isArray(header.label_set) || header.label_set.length < 2) {
    throw new TrainerError(`corrupt model config ${file}: bad label_set`);
  }
  return header;
}

/**
 * Score every record in inPath with the saved model and write them back,
 * in order, with predicted_label and probabilities filled; every other
 * field is preserved. The predicted label is the lexicographically least
 * among the highest-probability labels.
 */
export function predictBatch(modelDir: string, inPath: string, outPath: string): number {
  const header = loadHeader(modelDir);
  const labelSet = header.label_set;
  const model = BagClassifier.load(modelDir);
  const tokenizer = Tokenizer.load(path.join(modelDir, "vocab.json"));

  const records = readInterchange(inPath);
  for (const record of records) {
    if (record.gold_label !== undefined && !labelSet.includes(record.gold_label)) {
      throw new TrainerError(
        `label-set mismatch: record '${record.claim_id}' has gold_label ` +
          `'${record.gold_label}' outside the model's label set [${labelSet.join(", ")}]`,
      );
    }
  }

  const out = records.map((record) => {
    const probs = model.predictProba(tokenizer.encode(recordText(record)));
    const probabilities: Record<string, number> = {};
    let max = -Infinity;
    for (let k = 0; k < labelSet.length; k++) max = Math.max(max, probs[k]);
    let predicted: string | undefined;
    for (let k = 0; k < labelSet.length; k++) {
      probabilities[labelSet[k]] = probs[k];
      if (predicted === undefined && probs[k] === max) predicted = labelSet[k];
    }
    return { ...record, predicted_label: predicted as Label, probabilities };
  });
  writeInterchange(out, outPath);
  return out.length;
}
