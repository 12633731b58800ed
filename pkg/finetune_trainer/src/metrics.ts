/** Macro-averaged F1 with per-class 0/0 → 0, over a fixed label set. */
export function macroF1(gold: string[], predicted: string[], labelSet: string[]): number {
  if (gold.length !== predicted.length) {
    throw new Error(`gold/predicted length mismatch: ${gold.length} vs ${predicted.length}`);
  }
  let total = 0;
  for (const label of labelSet) {
    let tp = 0;
    let fp = 0;
    let fn = 0;
    for (let i = 0; i < gold.length; i++) {
      if (predicted[i] === label) {
        if (gold[i] === label) tp++;
        else fp++;
      } else if (gold[i] === label) {
        fn++;
      }
    }
    const precision = tp + fp > 0 ? tp / (tp + fp) : 0;
    const recall = tp + fn > 0 ? tp / (tp + fn) : 0;
    const f1 = precision + recall > 0 ? (2 * precision * recall) / (precision + recall) : 0;
    total += f1;
  }
  return total / labelSet.length;
}
