"""Dataset loading, label normalization, and deterministic splits.

Known benchmark profiles (label sets, published counts, split sizes)
ship as JSON under cer/data/datasets. Unknown dataset names still load;
they just fall back to generic proportional splits.
"""

from __future__ import annotations

import json
import logging
import math
import random
import re
from dataclasses import dataclass, replace
from importlib import resources

from .errors import DatasetError

log = logging.getLogger(__name__)

LABELS = ("NEI", "Refuted", "Supported")

# raw label string (lowercased, separators collapsed) -> canonical label
NORMALIZATION_MAP = {
    "true": "Supported",
    "yes": "Supported",
    "support": "Supported",
    "supports": "Supported",
    "supported": "Supported",
    "false": "Refuted",
    "no": "Refuted",
    "confute": "Refuted",
    "confutes": "Refuted",
    "refute": "Refuted",
    "refutes": "Refuted",
    "refuted": "Refuted",
    "contradict": "Refuted",
    "contradicts": "Refuted",
    "nei": "NEI",
    "not enough information": "NEI",
    "not enough info": "NEI",
}

_ID_KEYS = ("id", "claim_id")
_CLAIM_KEYS = ("claim", "text", "statement")
_LABEL_KEYS = ("label", "gold_label", "verdict")

_SPLIT_RATIOS = {"train": 0.6, "validation": 0.2, "test": 0.2}


@dataclass(frozen=True)
class ClaimRecord:
    claim_id: str
    claim: str
    gold_label: str | None
    dataset: str
    split: str | None = None


@dataclass
class DatasetSpec:
    name: str
    label_set: tuple[str, ...]
    records: list[ClaimRecord]
    expected_counts: dict[str, int] | None = None
    split_sizes: dict[str, int] | None = None

    def counts(self) -> dict[str, int]:
        out = {label: 0 for label in self.label_set}
        for record in self.records:
            out[record.gold_label] = out.get(record.gold_label, 0) + 1
        return out


def _canonical_key(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


def _load_profiles() -> dict[str, dict]:
    profiles: dict[str, dict] = {}
    root = resources.files("cer.data.datasets")
    for entry in root.iterdir():
        if not entry.name.endswith(".json"):
            continue
        profile = json.loads(entry.read_text(encoding="utf-8"))
        keys = {_canonical_key(profile["name"])}
        keys.update(_canonical_key(alias) for alias in profile.get("aliases", ()))
        for key in keys:
            profiles[key] = profile
    return profiles


_PROFILES = _load_profiles()


def dataset_profile(name: str) -> dict | None:
    return _PROFILES.get(_canonical_key(name))


def normalize_label(raw: str, row_ref: str = "") -> str:
    """Map a source label spelling onto {Supported, Refuted, NEI}."""
    if not isinstance(raw, str):
        raise DatasetError(f"{row_ref}: label must be a string, got {type(raw).__name__}")
    key = re.sub(r"[\s_/-]+", " ", raw.strip().lower())
    if key in NORMALIZATION_MAP:
        return NORMALIZATION_MAP[key]
    where = f"{row_ref}: " if row_ref else ""
    raise DatasetError(f"{where}unknown label {raw!r}")


def load_dataset(
    name: str,
    path,
    fmt: str | None = None,
    strict_counts: bool = False,
) -> DatasetSpec:
    """Read a claims file (JSONL or TSV) and normalize its labels.

    JSONL rows may use id/claim_id, claim/text/statement and
    label/gold_label/verdict key spellings; TSV rows are
    id<TAB>claim<TAB>label. With strict_counts, per-label totals must
    match the shipped profile's published counts.
    """
    if fmt is None:
        fmt = "tsv" if str(path).endswith(".tsv") else "jsonl"
    if fmt not in ("jsonl", "tsv"):
        raise DatasetError(f"unknown dataset format {fmt!r}, expected 'jsonl' or 'tsv'")
    profile = dataset_profile(name)
    records: list[ClaimRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            claim_id, claim, raw_label = _parse_claim_row(line, line_no, fmt, path)
            row_ref = f"{path} line {line_no} (id {claim_id})"
            if claim_id in seen:
                raise DatasetError(f"{row_ref}: duplicate claim id")
            seen.add(claim_id)
            records.append(
                ClaimRecord(
                    claim_id=claim_id,
                    claim=claim,
                    gold_label=normalize_label(raw_label, row_ref),
                    dataset=profile["name"] if profile else name,
                )
            )
    if profile:
        label_set = tuple(profile["label_set"])
        expected = dict(profile.get("expected_counts") or {})
        split_sizes = dict(profile.get("split_sizes") or {})
    else:
        label_set = tuple(sorted({r.gold_label for r in records}))
        expected = {}
        split_sizes = {}
    for record in records:
        if record.gold_label not in label_set:
            raise DatasetError(
                f"{path}: record {record.claim_id!r} has label {record.gold_label!r}, "
                f"outside {name}'s label set {label_set}"
            )
    ds = DatasetSpec(
        name=profile["name"] if profile else name,
        label_set=label_set,
        records=records,
        expected_counts=expected or None,
        split_sizes=split_sizes or None,
    )
    if strict_counts:
        if not expected:
            raise DatasetError(f"no published counts for {name}; cannot check strictly")
        actual = ds.counts()
        for label, count in expected.items():
            if actual.get(label, 0) != count:
                raise DatasetError(
                    f"{name}: expected {count} {label} records, found {actual.get(label, 0)}"
                )
    return ds


def _parse_claim_row(line: str, line_no: int, fmt: str, path) -> tuple[str, str, str]:
    if fmt == "tsv":
        cells = line.rstrip("\n").split("\t")
        if len(cells) < 3:
            raise DatasetError(f"{path} line {line_no}: expected 3 tab-separated cells")
        return cells[0], cells[1], cells[2]
    try:
        row = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path} line {line_no}: invalid JSON ({exc.msg})") from exc
    if not isinstance(row, dict):
        raise DatasetError(f"{path} line {line_no}: expected an object")

    def pick(keys):
        for key in keys:
            if key in row:
                return row[key]
        raise DatasetError(
            f"{path} line {line_no}: none of the keys {keys} present"
        )

    claim_id = pick(_ID_KEYS)
    claim = pick(_CLAIM_KEYS)
    label = pick(_LABEL_KEYS)
    if not isinstance(claim_id, str):
        claim_id = str(claim_id)
    if not isinstance(claim, str):
        raise DatasetError(f"{path} line {line_no}: claim must be a string")
    return claim_id, claim, label


def _largest_remainder(weights: list[int], total: int) -> list[int]:
    """Apportion `total` items proportionally to integer weights."""
    denom = sum(weights)
    if denom == 0:
        raise DatasetError("cannot apportion records: no records remain")
    quotas = [w * total / denom for w in weights]
    base = [math.floor(q) for q in quotas]
    short = total - sum(base)
    order = sorted(range(len(weights)), key=lambda i: (base[i] - quotas[i], i))
    for i in order[:short]:
        base[i] += 1
    return base


def split_dataset(ds: DatasetSpec, seed: int = 42):
    """Stratified, seed-deterministic (train, validation, test) split.

    Datasets with published split sizes get exactly those; others are
    split 60/20/20 with the rounding remainder allocated to train.
    Records beyond the documented totals stay unassigned (logged).
    """
    if not ds.records:
        raise DatasetError(f"{ds.name}: dataset has no records")
    n = len(ds.records)
    if ds.split_sizes:
        sizes = dict(ds.split_sizes)
    else:
        val = math.floor(n * _SPLIT_RATIOS["validation"])
        test = math.floor(n * _SPLIT_RATIOS["test"])
        sizes = {"train": n - val - test, "validation": val, "test": test}
    total = sum(sizes.values())
    if total > n:
        raise DatasetError(
            f"{ds.name}: split sizes {sizes} need {total} records, dataset has {n}"
        )
    groups: dict[str, list[ClaimRecord]] = {}
    for record in ds.records:
        groups.setdefault(record.gold_label, []).append(record)
    labels = sorted(groups)
    rng = random.Random(seed)
    for label in labels:
        rng.shuffle(groups[label])
    position = {label: 0 for label in labels}
    out: dict[str, list[ClaimRecord]] = {}
    # allocate test first, then validation; train draws from what's left
    for split_name in ("test", "validation", "train"):
        remaining = [len(groups[lab]) - position[lab] for lab in labels]
        alloc = _largest_remainder(remaining, sizes[split_name])
        bucket: list[ClaimRecord] = []
        for label, take in zip(labels, alloc):
            start = position[label]
            bucket.extend(
                replace(rec, split=split_name)
                for rec in groups[label][start : start + take]
            )
            position[label] = start + take
        out[split_name] = bucket
    leftover = n - total
    if leftover:
        log.warning(
            "%s: %d record(s) beyond the documented split totals left unassigned",
            ds.name, leftover,
        )
    return out["train"], out["validation"], out["test"]
