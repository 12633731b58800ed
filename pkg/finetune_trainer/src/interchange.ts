import * as fs from "node:fs";

import { SchemaError, TrainerError } from "./errors";

export const LABELS = ["NEI", "Refuted", "Supported"] as const;
export type Label = (typeof LABELS)[number];

export const SPLITS = ["train", "validation", "test"] as const;
export type Split = (typeof SPLITS)[number];

/** One claim verdict, as carried between pipeline stages as JSONL. */
export interface VerdictRecord {
  claim_id: string;
  claim: string;
  dataset: string;
  split: Split;
  gold_label?: Label;
  evidence: string[];
  justification: string;
  llm_label: Label;
  predicted_label?: Label;
  probabilities?: Record<string, number>;
  flags: string[];
}

/** Serialized key order; optional keys are omitted when absent. */
const FIELD_ORDER = [
  "claim_id",
  "claim",
  "dataset",
  "split",
  "gold_label",
  "evidence",
  "justification",
  "llm_label",
  "predicted_label",
  "probabilities",
  "flags",
] as const;

const REQUIRED = new Set([
  "claim_id",
  "claim",
  "dataset",
  "split",
  "evidence",
  "justification",
  "llm_label",
]);

const LABEL_FIELDS = new Set(["gold_label", "llm_label", "predicted_label"]);

function isLabel(value: unknown): value is Label {
  return (LABELS as readonly string[]).includes(value as string);
}

function parseRecord(row: Record<string, unknown>, line: number): VerdictRecord {
  const known = new Set<string>(FIELD_ORDER);
  for (const key of Object.keys(row)) {
    if (!known.has(key)) throw new SchemaError("unknown field", line, key);
  }
  for (const name of REQUIRED) {
    if (!(name in row)) throw new SchemaError("missing required field", line, name);
  }
  for (const name of ["claim_id", "claim", "dataset", "justification"]) {
    if (typeof row[name] !== "string") {
      throw new SchemaError("expected a string", line, name);
    }
  }
  if (!(SPLITS as readonly string[]).includes(row.split as string)) {
    throw new SchemaError(`invalid split ${JSON.stringify(row.split)}`, line, "split");
  }
  for (const name of LABEL_FIELDS) {
    if (name in row && row[name] !== undefined && !isLabel(row[name])) {
      throw new SchemaError(`invalid label ${JSON.stringify(row[name])}`, line, name);
    }
  }
  for (const name of ["evidence", "flags"]) {
    if (name in row) {
      const value = row[name];
      if (!Array.isArray(value) || value.some((item) => typeof item !== "string")) {
        throw new SchemaError("expected a list of strings", line, name);
      }
    }
  }
  if ("probabilities" in row && row.probabilities !== undefined) {
    const probs = row.probabilities;
    if (typeof probs !== "object" || probs === null || Array.isArray(probs)) {
      throw new SchemaError("expected an object", line, "probabilities");
    }
    for (const [label, p] of Object.entries(probs as Record<string, unknown>)) {
      if (!isLabel(label) || typeof p !== "number" || !Number.isFinite(p)) {
        throw new SchemaError("expected finite label probabilities", line, "probabilities");
      }
    }
  }
  return {
    claim_id: row.claim_id as string,
    claim: row.claim as string,
    dataset: row.dataset as string,
    split: row.split as Split,
    gold_label: row.gold_label as Label | undefined,
    evidence: (row.evidence as string[]) ?? [],
    justification: row.justification as string,
    llm_label: row.llm_label as Label,
    predicted_label: row.predicted_label as Label | undefined,
    probabilities: row.probabilities as Record<string, number> | undefined,
    flags: (row.flags as string[]) ?? [],
  };
}

/** Parse and validate JSONL; errors name the offending line and field. */
export function readInterchange(path: string): VerdictRecord[] {
  let raw: string;
  try {
    raw = fs.readFileSync(path, "utf-8");
  } catch (err) {
    throw new TrainerError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const records: VerdictRecord[] = [];
  const lines = raw.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (!line.trim()) continue;
    let row: unknown;
    try {
      row = JSON.parse(line);
    } catch (err) {
      throw new SchemaError(`invalid JSON: ${(err as Error).message}`, i + 1);
    }
    if (typeof row !== "object" || row === null || Array.isArray(row)) {
      throw new SchemaError("expected a JSON object", i + 1);
    }
    records.push(parseRecord(row as Record<string, unknown>, i + 1));
  }
  return records;
}

// --- canonical serialization -------------------------------------------------
// Byte-compatible with the primary component's writer: fixed key order,
// ", " / ": " separators, sorted flags and probability keys, non-ASCII
// characters kept raw (UTF-8), control characters escaped.

const SHORT_ESCAPES: Record<string, string> = {
  '"': '\\"',
  "\\": "\\\\",
  "\b": "\\b",
  "\t": "\\t",
  "\n": "\\n",
  "\f": "\\f",
  "\r": "\\r",
};

function encodeString(value: string): string {
  let out = '"';
  for (const ch of value) {
    const short = SHORT_ESCAPES[ch];
    if (short !== undefined) {
      out += short;
    } else if (ch < " ") {
      out += "\\u" + ch.codePointAt(0)!.toString(16).padStart(4, "0");
    } else {
      out += ch;
    }
  }
  return out + '"';
}

function encodeFloat(value: number): string {
  if (!Number.isFinite(value)) {
    throw new TrainerError(`cannot serialize non-finite number ${value}`);
  }
  // integral floats render with a trailing .0, as the consumer writes them
  if (Number.isInteger(value) && Math.abs(value) < 1e16) {
    return value.toFixed(1);
  }
  return String(value);
}

function encodeRecord(record: VerdictRecord): string {
  const parts: string[] = [];
  for (const name of FIELD_ORDER) {
    let value = (record as unknown as Record<string, unknown>)[name];
    if (name === "flags") {
      value = [...(record.flags ?? [])].sort();
    }
    if (value === undefined) continue;
    if (name === "probabilities") {
      const probs = record.probabilities!;
      const body = Object.keys(probs)
        .sort()
        .map((label) => `${encodeString(label)}: ${encodeFloat(probs[label])}`)
        .join(", ");
      parts.push(`${encodeString(name)}: {${body}}`);
    } else if (Array.isArray(value)) {
      const body = value.map((item) => encodeString(item as string)).join(", ");
      parts.push(`${encodeString(name)}: [${body}]`);
    } else {
      parts.push(`${encodeString(name)}: ${encodeString(value as string)}`);
    }
  }
  return `{${parts.join(", ")}}`;
}

/** Serialize records as JSONL, one canonical line per record. */
export function writeInterchange(records: VerdictRecord[], path: string): void {
  const lines = records.map((record) => encodeRecord(record) + "\n");
  fs.writeFileSync(path, lines.join(""), "utf-8");
}

/** claim ⊕ [SEP] ⊕ evidence ⊕ [SEP] ⊕ justification — the model input text. */
export function recordText(record: VerdictRecord): string {
  return `${record.claim} [SEP] ${record.evidence.join(" ")} [SEP] ${record.justification}`;
}
