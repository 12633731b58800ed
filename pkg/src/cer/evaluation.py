"""Evaluation harness: baselines, cross-dataset matrix, ablations, stats.

Everything here reduces to macro_metrics in the end; what varies is how
the predictions are produced (constant label, trained classifier after
retraining per dataset pair, or the reasoning label under different
prompt variants).
"""

from __future__ import annotations

import csv
from dataclasses import replace

import numpy as np

from .corpus import segment_sentences
from .datasets import DatasetSpec
from .errors import DatasetError
from .metrics import EvalReport, macro_metrics
from .pipeline import evaluate_records, run_pipeline
from .reasoning import VARIANTS
from .veracity import TrainConfig, VerdictRecord, train_classifier

_BASELINE_LABEL = {
    "all_supported": "Supported",
    "all_refuted": "Refuted",
    "all_nei": "NEI",
}


def run_baseline(ds: DatasetSpec, which: str) -> EvalReport:
    """Score a constant predictor over the dataset's label distribution."""
    if which not in _BASELINE_LABEL:
        raise ValueError(
            f"unknown baseline {which!r}, expected one of {sorted(_BASELINE_LABEL)}"
        )
    label = _BASELINE_LABEL[which]
    if label not in ds.label_set:
        raise DatasetError(
            f"{ds.name} has no {label!r} class; the {which} baseline is undefined"
        )
    gold = [record.gold_label for record in ds.records]
    return macro_metrics(gold, [label] * len(gold), ds.label_set)


def drop_nei(ds: DatasetSpec) -> DatasetSpec:
    """Remove the NEI class: records filtered, name suffixed '-2'.

    Surviving records are the very same objects, untouched.
    """
    if "NEI" not in ds.label_set:
        raise DatasetError(f"{ds.name} has no NEI class to drop")
    records = [record for record in ds.records if record.gold_label != "NEI"]
    expected = None
    if ds.expected_counts:
        expected = {k: v for k, v in ds.expected_counts.items() if k != "NEI"}
    return DatasetSpec(
        name=f"{ds.name}-2",
        label_set=tuple(lab for lab in ds.label_set if lab != "NEI"),
        records=records,
        expected_counts=expected,
        split_sizes=None,
    )


def _split_records(records: list[VerdictRecord], name: str):
    by_split: dict[str, list[VerdictRecord]] = {"train": [], "validation": [], "test": []}
    for record in records:
        by_split[record.split].append(record)
    for split_name in ("train", "test"):
        if not by_split[split_name]:
            raise DatasetError(f"{name}: no records with split={split_name!r}")
    return by_split


def _gold_labels(records) -> set[str]:
    missing = [r.claim_id for r in records if r.gold_label is None]
    if missing:
        raise DatasetError(f"records without gold_label: {missing[:5]}")
    return {r.gold_label for r in records}


def cross_eval(
    train_names,
    test_names,
    data: dict[str, list[VerdictRecord]],
    config: TrainConfig | None = None,
) -> dict[str, dict[str, EvalReport]]:
    """Train on each train-dataset, evaluate on each test-dataset.

    When one side lacks NEI, NEI-gold records are dropped from both
    sides of that cell (the published protocol's "-2" alignment); any
    other label-set mismatch is an error. Diagonal cells are exactly a
    standalone train/evaluate run on that dataset.
    """
    for name in list(train_names) + list(test_names):
        if name not in data:
            raise DatasetError(f"no interchange records supplied for dataset {name!r}")
    splits = {name: _split_records(records, name) for name, records in data.items()}
    labels = {name: _gold_labels(records) for name, records in data.items()}
    model_cache: dict[tuple[str, tuple[str, ...]], object] = {}
    matrix: dict[str, dict[str, EvalReport]] = {}
    for train_name in train_names:
        matrix[train_name] = {}
        for test_name in test_names:
            effective = labels[train_name] & labels[test_name]
            mismatch = labels[train_name] ^ labels[test_name]
            if mismatch - {"NEI"}:
                raise DatasetError(
                    f"label sets of {train_name} and {test_name} differ by "
                    f"{sorted(mismatch)}; only an NEI gap can be aligned"
                )
            label_set = tuple(sorted(effective))
            key = (train_name, label_set)
            if key not in model_cache:
                train_records = [
                    r for r in splits[train_name]["train"] if r.gold_label in effective
                ]
                val_records = [
                    r for r in splits[train_name]["validation"] if r.gold_label in effective
                ]
                model_cache[key] = train_classifier(train_records, val_records, config)
            model = model_cache[key]
            test_records = [
                r for r in splits[test_name]["test"] if r.gold_label in effective
            ]
            if not test_records:
                raise DatasetError(
                    f"{test_name}: no test records left after label alignment"
                )
            gold = [r.gold_label for r in test_records]
            predicted = [model.predict_record(r)[0] for r in test_records]
            matrix[train_name][test_name] = macro_metrics(gold, predicted, label_set)
    return matrix


def format_cross_eval(matrix: dict[str, dict[str, EvalReport]]) -> str:
    """Train-by-test table of macro-F1 percentages."""
    train_names = list(matrix)
    test_names = list(next(iter(matrix.values()))) if matrix else []
    corner = "train \\ test"
    width = max((len(n) for n in train_names + test_names), default=5) + 2
    width = max(width, len(corner) + 2)
    header = f"{corner:<{width}}" + "".join(f"{n:>{width}}" for n in test_names)
    lines = [header]
    for tname in train_names:
        cells = "".join(
            f"{100 * matrix[tname][sname].macro_f1:>{width}.2f}" for sname in test_names
        )
        lines.append(f"{tname:<{width}}" + cells)
    return "\n".join(lines)


def ablation_run(
    claims,
    variants,
    provider,
    *,
    mode: str = "sparse",
    k: int = 20,
    m: int = 3,
    sparse_index=None,
    dense_index=None,
    dense_provider=None,
    cache=None,
    char_budget: int = 24000,
    max_in_flight: int = 4,
    label_set=None,
) -> list[tuple[str, EvalReport]]:
    """One pipeline run per prompt variant, scored zero-shot.

    The runs differ only in the build_prompt variant; the reasoning
    label is taken as the prediction, which isolates the prompt's
    effect from any trained classifier. Row order = input order.
    """
    claims = list(claims)
    for variant in variants:
        if variant not in VARIANTS:
            raise ValueError(f"unknown prompt variant {variant!r}, expected one of {VARIANTS}")
    for claim in claims:
        if claim.gold_label is None:
            raise DatasetError(f"claim {claim.claim_id!r} has no gold_label")
    if label_set is None:
        label_set = tuple(sorted({c.gold_label for c in claims}))
    rows: list[tuple[str, EvalReport]] = []
    for variant in variants:
        records = run_pipeline(
            claims,
            provider,
            mode=mode,
            k=k,
            m=m,
            variant=variant,
            sparse_index=sparse_index,
            dense_index=dense_index,
            dense_provider=dense_provider,
            cache=cache,
            char_budget=char_budget,
            max_in_flight=max_in_flight,
        )
        scored = [replace(r, predicted_label=r.llm_label) for r in records]
        report = evaluate_records(scored, label_set=label_set)
        rows.append((variant, report))
    return rows


def format_ablation(rows: list[tuple[str, EvalReport]]) -> str:
    """Variant rows with macro P/R/F1 percentage columns."""
    width = max(len(v) for v, _ in rows) + 2 if rows else 10
    lines = [f"{'variant':<{width}}  {'P (%)':>8}  {'R (%)':>8}  {'F1 (%)':>8}"]
    for variant, report in rows:
        lines.append(
            f"{variant:<{width}}  {100 * report.macro_precision:>8.2f}"
            f"  {100 * report.macro_recall:>8.2f}  {100 * report.macro_f1:>8.2f}"
        )
    return "\n".join(lines)


def corpus_stats(documents, bins: int = 50) -> list[tuple[float, float, int]]:
    """Histogram of per-document mean sentence length (characters).

    Returns (bin_start, bin_end, count) triples covering all documents
    that have at least one sentence.
    """
    means = []
    for doc in documents:
        sentences = segment_sentences(doc.abstract_text)
        if sentences:
            means.append(sum(len(s) for s in sentences) / len(sentences))
    if not means:
        raise DatasetError("no documents with sentences; nothing to histogram")
    counts, edges = np.histogram(means, bins=bins)
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i]))
        for i in range(len(counts))
    ]


def write_stats_csv(rows: list[tuple[float, float, int]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["bin_start", "bin_end", "count"])
        for bin_start, bin_end, count in rows:
            writer.writerow([f"{bin_start:.6g}", f"{bin_end:.6g}", count])
