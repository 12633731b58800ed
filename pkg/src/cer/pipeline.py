"""End-to-end orchestration: claims -> evidence -> reasoning -> verdicts.

Stages communicate through files so each CLI subcommand can run alone:
retrieval emits an evidence JSONL (claim plus ranked hits), reasoning
turns it into interchange records, classification fills in predictions.
Provider calls fan out across a bounded thread pool; results are sorted
by claim_id before anything is written, so concurrency never changes
output bytes.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .datasets import ClaimRecord
from .errors import DatasetError, SchemaError
from .evidence import EvidenceSentence, EvidenceSet, assemble_pair, retrieve_evidence
from .metrics import EvalReport, macro_metrics
from .reasoning import (
    DEFAULT_CHAR_BUDGET,
    LLMProvider,
    ResponseCache,
    build_prompt,
    invoke_llm,
    parse_reasoning,
)
from .veracity import VerdictRecord, zero_shot_classify

DEFAULT_K = 20
DEFAULT_M = 3
DEFAULT_IN_FLIGHT = 4


@dataclass
class ClaimEvidence:
    claim: ClaimRecord
    evidence: EvidenceSet


def retrieve_for_claims(
    claims,
    mode: str = "sparse",
    k: int = DEFAULT_K,
    *,
    sparse_index=None,
    dense_index=None,
    dense_provider=None,
) -> list[ClaimEvidence]:
    out = []
    for claim in claims:
        evidence = retrieve_evidence(
            claim.claim,
            mode=mode,
            k=k,
            claim_id=claim.claim_id,
            sparse_index=sparse_index,
            dense_index=dense_index,
            dense_provider=dense_provider,
        )
        out.append(ClaimEvidence(claim=claim, evidence=evidence))
    return out


def write_evidence_file(entries, path) -> None:
    with open(path, "w", encoding="utf-8") as out:
        for entry in entries:
            row = {
                "claim_id": entry.claim.claim_id,
                "claim": entry.claim.claim,
                "dataset": entry.claim.dataset,
                "split": entry.claim.split,
                "gold_label": entry.claim.gold_label,
                "hits": [
                    {
                        "sentence_id": h.sentence_id,
                        "text": h.text,
                        "score": h.score,
                        "rank": h.rank,
                    }
                    for h in entry.evidence.hits
                ],
            }
            if row["gold_label"] is None:
                del row["gold_label"]
            if row["split"] is None:
                del row["split"]
            out.write(json.dumps(row, ensure_ascii=False))
            out.write("\n")


def read_evidence_file(path) -> list[ClaimEvidence]:
    entries = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line=line_no) from exc
            for name in ("claim_id", "claim", "hits"):
                if name not in row:
                    raise SchemaError("missing required field", line=line_no, field=name)
            claim = ClaimRecord(
                claim_id=row["claim_id"],
                claim=row["claim"],
                gold_label=row.get("gold_label"),
                dataset=row.get("dataset", ""),
                split=row.get("split"),
            )
            hits = [
                EvidenceSentence(
                    sentence_id=h["sentence_id"],
                    text=h["text"],
                    score=float(h["score"]),
                    rank=int(h["rank"]),
                )
                for h in row["hits"]
            ]
            entries.append(
                ClaimEvidence(claim, EvidenceSet(claim_id=row["claim_id"], hits=hits))
            )
    return entries


def _reason_one(
    entry: ClaimEvidence,
    provider: LLMProvider,
    cache: ResponseCache | None,
    variant: str,
    m: int,
    char_budget: int,
) -> VerdictRecord:
    claim = entry.claim
    prompt = build_prompt(
        claim.claim, entry.evidence.texts, variant=variant, char_budget=char_budget
    )
    raw = invoke_llm(prompt, provider, cache)
    parsed = parse_reasoning(raw)
    pair = assemble_pair(claim.claim, entry.evidence, m=m)
    flags = set()
    if pair.empty_evidence:
        flags.add("empty_evidence")
    if not parsed.parse_ok:
        flags.add("parse_failed")
    return VerdictRecord(
        claim_id=claim.claim_id,
        claim=claim.claim,
        dataset=claim.dataset,
        split=claim.split or "test",
        gold_label=claim.gold_label,
        evidence=entry.evidence.texts[:m],
        justification=parsed.justification,
        llm_label=parsed.llm_label,
        flags=flags,
    )


def reason_over_evidence(
    entries,
    provider: LLMProvider,
    cache: ResponseCache | None = None,
    variant: str = "full",
    m: int = DEFAULT_M,
    char_budget: int = DEFAULT_CHAR_BUDGET,
    max_in_flight: int = DEFAULT_IN_FLIGHT,
) -> list[VerdictRecord]:
    """Run the reasoning stage over all entries, at most max_in_flight
    provider calls at a time. Output is sorted by claim_id, so the
    result does not depend on completion order."""
    entries = list(entries)
    if max_in_flight < 1:
        raise ValueError(f"max_in_flight must be >= 1, got {max_in_flight}")
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        records = list(
            pool.map(
                lambda e: _reason_one(e, provider, cache, variant, m, char_budget),
                entries,
            )
        )
    return sorted(records, key=lambda r: r.claim_id)


def run_pipeline(
    claims,
    provider: LLMProvider,
    *,
    mode: str = "sparse",
    k: int = DEFAULT_K,
    m: int = DEFAULT_M,
    variant: str = "full",
    sparse_index=None,
    dense_index=None,
    dense_provider=None,
    cache: ResponseCache | None = None,
    char_budget: int = DEFAULT_CHAR_BUDGET,
    max_in_flight: int = DEFAULT_IN_FLIGHT,
) -> list[VerdictRecord]:
    """Claims all the way to reasoning-stage interchange records."""
    entries = retrieve_for_claims(
        claims,
        mode=mode,
        k=k,
        sparse_index=sparse_index,
        dense_index=dense_index,
        dense_provider=dense_provider,
    )
    return reason_over_evidence(
        entries,
        provider,
        cache=cache,
        variant=variant,
        m=m,
        char_budget=char_budget,
        max_in_flight=max_in_flight,
    )


def classify_records(
    records,
    model=None,
    provider_mode: str | None = None,
    endpoint: str | None = None,
) -> list[VerdictRecord]:
    """Fill predicted_label (and probabilities, for the trained path) on
    a copy of each record. Exactly one of model / provider_mode applies."""
    if (model is None) == (provider_mode is None):
        raise ValueError("pass either a trained model or a zero-shot provider_mode")
    out = []
    for record in records:
        if model is not None:
            label, probs = model.predict_record(record)
            out.append(
                replace(record, predicted_label=label, probabilities=probs,
                        flags=set(record.flags))
            )
        else:
            label = zero_shot_classify(record, provider_mode, endpoint=endpoint)
            out.append(replace(record, predicted_label=label, flags=set(record.flags)))
    return out


def evaluate_records(records, label_set=None) -> EvalReport:
    """Score predicted_label against gold_label over finished records."""
    records = list(records)
    gold, predicted = [], []
    for record in records:
        if record.gold_label is None:
            raise DatasetError(f"record {record.claim_id!r} has no gold_label to score against")
        if record.predicted_label is None:
            raise DatasetError(f"record {record.claim_id!r} has no predicted_label")
        gold.append(record.gold_label)
        predicted.append(record.predicted_label)
    if label_set is None:
        label_set = tuple(sorted(set(gold) | set(predicted)))
    return macro_metrics(gold, predicted, label_set)
