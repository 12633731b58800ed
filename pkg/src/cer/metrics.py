"""Macro-averaged classification metrics over an explicit label set.

Per-class precision, recall and F1 use the 0/0 -> 0 convention, and the
macro average runs over every label in the declared set, including
labels the predictor never emits. Both choices matter: they are what
makes constant-predictor scores reproduce published baseline rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    label_set: tuple[str, ...]
    per_label: dict[str, LabelMetrics]
    confusion: dict[str, dict[str, int]]  # gold label -> predicted label -> count
    macro_precision: float
    macro_recall: float
    macro_f1: float
    n_examples: int

    def to_dict(self) -> dict:
        return {
            "label_set": list(self.label_set),
            "n_examples": self.n_examples,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "per_label": {
                label: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in self.per_label.items()
            },
            "confusion": {g: dict(row) for g, row in self.confusion.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def format_table(self) -> str:
        """Aligned text table with percentages to 2 decimals."""
        width = max(len("macro avg"), *(len(lab) for lab in self.label_set))
        lines = [
            f"{'label':<{width}}  {'P (%)':>8}  {'R (%)':>8}  {'F1 (%)':>8}  {'support':>8}"
        ]
        for label in self.label_set:
            m = self.per_label[label]
            lines.append(
                f"{label:<{width}}  {100 * m.precision:>8.2f}  {100 * m.recall:>8.2f}"
                f"  {100 * m.f1:>8.2f}  {m.support:>8d}"
            )
        lines.append(
            f"{'macro avg':<{width}}  {100 * self.macro_precision:>8.2f}"
            f"  {100 * self.macro_recall:>8.2f}  {100 * self.macro_f1:>8.2f}"
            f"  {self.n_examples:>8d}"
        )
        return "\n".join(lines)


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def macro_metrics(gold, predicted, label_set) -> EvalReport:
    """Compute per-class and macro P/R/F1 plus the confusion matrix.

    gold and predicted must have equal length and only use labels from
    label_set; violations raise ValueError naming the offender.
    """
    gold = list(gold)
    predicted = list(predicted)
    if len(gold) != len(predicted):
        raise ValueError(
            f"gold has {len(gold)} labels, predicted has {len(predicted)}"
        )
    label_set = tuple(label_set)
    if not label_set:
        raise ValueError("label set is empty")
    if len(set(label_set)) != len(label_set):
        raise ValueError(f"label set has duplicates: {label_set}")
    known = set(label_set)
    confusion = {g: {p: 0 for p in label_set} for g in label_set}
    for i, (g, p) in enumerate(zip(gold, predicted)):
        if g not in known:
            raise ValueError(f"gold label {g!r} at position {i} is not in the label set")
        if p not in known:
            raise ValueError(
                f"predicted label {p!r} at position {i} is not in the label set"
            )
        confusion[g][p] += 1
    per_label: dict[str, LabelMetrics] = {}
    for label in label_set:
        tp = confusion[label][label]
        fn = sum(confusion[label][p] for p in label_set if p != label)
        fp = sum(confusion[g][label] for g in label_set if g != label)
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_label[label] = LabelMetrics(precision, recall, f1, support=tp + fn)
    n_labels = len(label_set)
    return EvalReport(
        label_set=label_set,
        per_label=per_label,
        confusion=confusion,
        macro_precision=sum(m.precision for m in per_label.values()) / n_labels,
        macro_recall=sum(m.recall for m in per_label.values()) / n_labels,
        macro_f1=sum(m.f1 for m in per_label.values()) / n_labels,
        n_examples=len(gold),
    )
