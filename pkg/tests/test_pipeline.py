"""Pipeline orchestration: evidence files, concurrent reasoning, scoring."""

from __future__ import annotations

import json
import threading

import pytest

from cer.datasets import ClaimRecord
from cer.errors import DatasetError, SchemaError
from cer.evidence import EvidenceSentence, EvidenceSet
from cer.pipeline import (
    ClaimEvidence,
    classify_records,
    evaluate_records,
    read_evidence_file,
    reason_over_evidence,
    retrieve_for_claims,
    run_pipeline,
    write_evidence_file,
)
from cer.reasoning import CallableLLMProvider, CannedLLMProvider
from cer.veracity import VeracityClassifier, VerdictRecord


def _claim(cid="c1", text="Aspirin reduces cardiovascular risk.", **overrides):
    base = dict(claim_id=cid, claim=text, gold_label="Supported",
                dataset="fixture", split="test")
    base.update(overrides)
    return ClaimRecord(**base)


def _entry(cid="c1", n_hits=3, **claim_overrides):
    hits = [
        EvidenceSentence(f"d{i}#0", f"Evidence sentence {i} for {cid}.", 3.0 - i, i)
        for i in range(n_hits)
    ]
    return ClaimEvidence(_claim(cid, **claim_overrides), EvidenceSet(cid, hits))


# -- evidence files -----------------------------------------------------------


def test_evidence_file_round_trip(tmp_path):
    entries = [_entry("c1"), _entry("c2", n_hits=0, gold_label=None, split=None)]
    path = tmp_path / "evidence.jsonl"
    write_evidence_file(entries, path)
    loaded = read_evidence_file(path)
    assert loaded == entries

    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert rows[0]["hits"][0] == {
        "sentence_id": "d0#0",
        "text": "Evidence sentence 0 for c1.",
        "score": 3.0,
        "rank": 0,
    }
    assert "gold_label" not in rows[1]
    assert "split" not in rows[1]

    second = tmp_path / "again.jsonl"
    write_evidence_file(loaded, second)
    assert path.read_bytes() == second.read_bytes()


def test_evidence_file_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "evidence.jsonl"
    write_evidence_file([_entry("c1")], path)
    good_line = path.read_text().splitlines()[0]

    path.write_text(good_line + "\n{bad json\n", encoding="utf-8")
    with pytest.raises(SchemaError) as exc_info:
        read_evidence_file(path)
    assert exc_info.value.line == 2

    path.write_text('{"claim_id": "x", "claim": "y"}\n', encoding="utf-8")
    with pytest.raises(SchemaError) as exc_info:
        read_evidence_file(path)
    assert exc_info.value.field == "hits"
    assert exc_info.value.line == 1


def test_retrieve_for_claims_uses_index(sparse_index):
    claims = [_claim("c1", "aspirin cardiovascular risk"), _claim("c2", "statin therapy")]
    entries = retrieve_for_claims(claims, mode="sparse", k=5, sparse_index=sparse_index)
    assert [e.claim.claim_id for e in entries] == ["c1", "c2"]
    assert len(entries[0].evidence.hits) == 5
    assert 0 < len(entries[1].evidence.hits) <= 5  # only term-sharing candidates
    assert entries[0].evidence.hits[0].sentence_id.startswith("aspirin-cvd#")


# -- reasoning stage ----------------------------------------------------------


def test_reason_over_evidence_sorts_and_flags():
    provider = CannedLLMProvider()
    entries = [_entry("zz"), _entry("aa", n_hits=0), _entry("mm")]
    records = reason_over_evidence(entries, provider)
    assert [r.claim_id for r in records] == ["aa", "mm", "zz"]
    by_id = {r.claim_id: r for r in records}
    assert by_id["aa"].flags == {"empty_evidence"}
    assert by_id["aa"].evidence == []
    assert by_id["zz"].flags == set()
    assert all(r.llm_label in ("NEI", "Refuted", "Supported") for r in records)
    for record in records:
        record.validate()


def test_reasoning_evidence_truncated_to_m():
    provider = CannedLLMProvider()
    entries = [_entry("c1", n_hits=7)]
    records = reason_over_evidence(entries, provider, m=2)
    assert records[0].evidence == [
        "Evidence sentence 0 for c1.",
        "Evidence sentence 1 for c1.",
    ]
    default = reason_over_evidence(entries, provider)
    assert len(default[0].evidence) == 3


def test_concurrency_does_not_change_output():
    class SlowCanned(CannedLLMProvider):
        def __init__(self):
            super().__init__()
            self.max_seen = 0
            self._active = 0
            self._lock = threading.Lock()

        def complete(self, prompt):
            with self._lock:
                self._active += 1
                self.max_seen = max(self.max_seen, self._active)
            try:
                import time

                time.sleep(0.02)
                return super().complete(prompt)
            finally:
                with self._lock:
                    self._active -= 1

    entries = [_entry(f"c{i:02d}") for i in range(10)]
    parallel_provider = SlowCanned()
    parallel = reason_over_evidence(entries, parallel_provider, max_in_flight=4)
    serial = reason_over_evidence(entries, SlowCanned(), max_in_flight=1)
    assert parallel == serial
    assert parallel_provider.max_seen > 1  # the pool actually fanned out
    with pytest.raises(ValueError, match="max_in_flight"):
        reason_over_evidence(entries, SlowCanned(), max_in_flight=0)


def test_parse_failure_flagged():
    records = reason_over_evidence(
        [_entry("c1")],
        CallableLLMProvider(lambda prompt: "I cannot comply with the format."),
    )
    assert records[0].llm_label == "NEI"
    assert records[0].flags == {"parse_failed"}


def test_run_pipeline_end_to_end(sparse_index, fixture_claims):
    records = run_pipeline(
        fixture_claims[:4],
        CannedLLMProvider(),
        mode="sparse",
        k=5,
        sparse_index=sparse_index,
    )
    assert len(records) == 4
    assert [r.claim_id for r in records] == sorted(r.claim_id for r in records)
    for record in records:
        record.validate()
        assert 0 < len(record.evidence) <= 3
        assert record.dataset == "fixture"


# -- classification and scoring ----------------------------------------------


def _verdict(cid, llm_label="Supported", gold_label="Supported", **overrides):
    base = dict(
        claim_id=cid,
        claim=f"Claim {cid} improves outcomes.",
        dataset="fixture",
        split="test",
        evidence=[f"Evidence for {cid}."],
        justification="Because the evidence says so.",
        llm_label=llm_label,
        gold_label=gold_label,
    )
    base.update(overrides)
    return VerdictRecord(**base)


def test_classify_records_requires_exactly_one_mode():
    records = [_verdict("c1")]
    with pytest.raises(ValueError, match="either"):
        classify_records(records)
    with pytest.raises(ValueError, match="either"):
        classify_records(
            records, model=VeracityClassifier(), provider_mode="llm_passthrough"
        )


def test_classify_records_zero_shot_copies():
    records = [_verdict("c1", llm_label="Refuted"), _verdict("c2", llm_label="NEI")]
    out = classify_records(records, provider_mode="llm_passthrough")
    assert [r.predicted_label for r in out] == ["Refuted", "NEI"]
    assert all(r.predicted_label is None for r in records)  # inputs untouched
    assert out[0].probabilities is None


def test_classify_records_trained_path():
    train = [
        _verdict(f"s{i}", claim=f"drug improves recovery {i}", llm_label="Supported")
        for i in range(6)
    ] + [
        _verdict(
            f"r{i}",
            claim=f"drug worsens recovery {i}",
            llm_label="Refuted",
            gold_label="Refuted",
        )
        for i in range(6)
    ]
    model = VeracityClassifier(max_epochs=80).fit(train)
    out = classify_records(train, model=model)
    assert [r.predicted_label for r in out] == [r.gold_label for r in train]
    for record in out:
        assert record.probabilities is not None
        record.validate()


def test_evaluate_records():
    records = [
        _verdict("c1", predicted_label="Supported"),
        _verdict("c2", gold_label="Refuted", predicted_label="Refuted", llm_label="Refuted"),
        _verdict("c3", gold_label="NEI", predicted_label="Supported", llm_label="NEI"),
    ]
    report = evaluate_records(records)
    assert report.label_set == ("NEI", "Refuted", "Supported")
    assert report.per_label["Refuted"].f1 == 1.0
    assert report.per_label["NEI"].f1 == 0.0
    explicit = evaluate_records(records, label_set=("NEI", "Refuted", "Supported"))
    assert explicit.to_dict() == report.to_dict()


def test_evaluate_records_requires_labels():
    with pytest.raises(DatasetError, match="no predicted_label"):
        evaluate_records([_verdict("c1")])
    with pytest.raises(DatasetError, match="no gold_label"):
        evaluate_records([_verdict("c1", gold_label=None, predicted_label="NEI")])
