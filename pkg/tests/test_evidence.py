"""Claim–evidence assembly and the separator contract."""

from __future__ import annotations

import pytest

from cer.errors import ConfigError
from cer.evidence import (
    SEPARATOR,
    EvidenceSentence,
    EvidenceSet,
    assemble_pair,
    retrieve_evidence,
    split_pair,
)


def _ev(*texts: str) -> EvidenceSet:
    hits = [
        EvidenceSentence(f"s#{i}", text, float(10 - i), i)
        for i, text in enumerate(texts)
    ]
    return EvidenceSet(claim_id="c", hits=hits)


def test_separator_value():
    assert SEPARATOR == " [SEP] "


def test_assemble_exact_format():
    pair = assemble_pair("Claim text.", _ev("First.", "Second.", "Third."))
    assert pair.text == "Claim text. [SEP] First., Second., Third."
    assert pair.empty_evidence is False


def test_assemble_keeps_top_m():
    pair = assemble_pair("C", _ev("a", "b", "c", "d", "e"), m=3)
    assert pair.text == "C [SEP] a, b, c"
    pair2 = assemble_pair("C", _ev("a", "b", "c", "d", "e"), m=2)
    assert pair2.text == "C [SEP] a, b"


def test_assemble_fewer_than_m():
    pair = assemble_pair("C", _ev("only"))
    assert pair.text == "C [SEP] only"


def test_assemble_empty_evidence():
    pair = assemble_pair("C", _ev())
    assert pair.text == "C [SEP] "
    assert pair.empty_evidence is True


def test_split_pair_round_trip():
    pair = assemble_pair("Claim here.", _ev("One.", "Two."))
    claim, evidence = split_pair(pair.text)
    assert claim == "Claim here."
    assert evidence == "One., Two."


def test_split_pair_uses_first_separator():
    text = "claim [SEP] evidence [SEP] more"
    claim, evidence = split_pair(text)
    assert claim == "claim"
    assert evidence == "evidence [SEP] more"


def test_split_pair_without_separator():
    claim, evidence = split_pair("no separator at all")
    assert claim == "no separator at all"
    assert evidence == ""


def test_retrieve_evidence_resolves_texts(sparse_index):
    ev = retrieve_evidence(
        "aspirin cardiovascular risk", mode="sparse", k=3,
        claim_id="q1", sparse_index=sparse_index,
    )
    assert ev.claim_id == "q1"
    assert ev.hits, "expected at least one hit"
    assert ev.hits[0].sentence_id.startswith("aspirin-cvd")
    assert "aspirin" in ev.hits[0].text.lower()
    assert ev.texts == [h.text for h in ev.hits]
    assert [h.rank for h in ev.hits] == list(range(len(ev.hits)))


def test_retrieve_evidence_mode_validation(sparse_index):
    with pytest.raises(ConfigError):
        retrieve_evidence("q", mode="hybrid", k=3, sparse_index=sparse_index)
    with pytest.raises(ConfigError):
        retrieve_evidence("q", mode="sparse", k=3)  # no index
    with pytest.raises(ConfigError):
        retrieve_evidence("q", mode="dense", k=3)  # no index/provider
