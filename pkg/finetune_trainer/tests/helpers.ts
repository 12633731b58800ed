import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { Label, VerdictRecord } from "../src/interchange";

export function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "ft-test-"));
}

const PHRASES: Record<Label, string> = {
  Supported: "improves recovery outcomes",
  Refuted: "worsens recovery outcomes",
  NEI: "has uncertain recovery effects",
};

/** Separable three-class records: the phrase determines the label. */
export function separableRecords(
  split: "train" | "validation" | "test",
  nPerLabel: number,
  withGold = true,
): VerdictRecord[] {
  const out: VerdictRecord[] = [];
  for (const label of Object.keys(PHRASES) as Label[]) {
    for (let i = 0; i < nPerLabel; i++) {
      out.push({
        claim_id: `${split}-${label}-${i}`,
        claim: `the treatment ${PHRASES[label]} in trial ${i}`,
        dataset: "synthetic",
        split,
        gold_label: withGold ? label : undefined,
        evidence: [`study ${i} found it ${PHRASES[label]}`],
        justification: "",
        llm_label: label,
        flags: [],
      });
    }
  }
  return out;
}
