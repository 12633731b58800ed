"""Dataset loading, label normalization, profiles, and splits."""

from __future__ import annotations

import json
import logging

import pytest
from hypothesis import given, strategies as st

from cer.datasets import (
    ClaimRecord,
    DatasetSpec,
    _largest_remainder,
    dataset_profile,
    load_dataset,
    normalize_label,
    split_dataset,
)
from cer.errors import DatasetError


# -- label normalization ------------------------------------------------------


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("SUPPORTS", "Supported"),
        ("supported", "Supported"),
        ("true", "Supported"),
        ("Yes", "Supported"),
        ("REFUTES", "Refuted"),
        ("false", "Refuted"),
        ("no", "Refuted"),
        ("CONTRADICT", "Refuted"),
        ("contradicts", "Refuted"),
        ("confutes", "Refuted"),
        ("nei", "NEI"),
        ("NEI", "NEI"),
        ("Not Enough Information", "NEI"),
        ("not_enough_info", "NEI"),
        ("NOT-ENOUGH-INFORMATION", "NEI"),
        ("not  enough\tinformation", "NEI"),
        ("not/enough/info", "NEI"),
        ("  Supported  ", "Supported"),
    ],
)
def test_normalize_label_table(raw, expected):
    assert normalize_label(raw) == expected


def test_normalize_label_unknown_names_row():
    with pytest.raises(DatasetError) as exc_info:
        normalize_label("mostly-true", row_ref="claims.jsonl line 7 (id x1)")
    message = str(exc_info.value)
    assert "line 7" in message
    assert "mostly-true" in message
    with pytest.raises(DatasetError):
        normalize_label(3)  # non-string


# -- profiles -----------------------------------------------------------------


def test_shipped_profiles_resolve_by_alias():
    for name in ("HealthFC", "healthfc", "Health-FC", "HEALTHFC"):
        assert dataset_profile(name)["name"] == "HealthFC"
    for name in ("SciFact", "sci_fact", "SCIFACT"):
        assert dataset_profile(name)["name"] == "SciFact"
    for name in ("BioASQ-7b", "bioasq", "BioASQ7B"):
        assert dataset_profile(name)["name"] == "BioASQ-7b"
    assert dataset_profile("made-up-benchmark") is None


def test_profile_contents():
    healthfc = dataset_profile("healthfc")
    assert tuple(healthfc["label_set"]) == ("NEI", "Refuted", "Supported")
    assert healthfc["expected_counts"] == {"Supported": 202, "Refuted": 125, "NEI": 433}
    assert healthfc["split_sizes"] == {"train": 451, "validation": 151, "test": 151}
    scifact = dataset_profile("scifact")
    assert scifact["expected_counts"] == {"Supported": 556, "Refuted": 516, "NEI": 337}
    assert scifact["split_sizes"] == {"train": 809, "validation": 300, "test": 300}
    bioasq = dataset_profile("bioasq")
    assert tuple(bioasq["label_set"]) == ("Refuted", "Supported")
    assert bioasq["expected_counts"] == {"Supported": 614, "Refuted": 131}


# -- loading ------------------------------------------------------------------


def _write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")


def test_load_jsonl_with_key_aliases(tmp_path):
    path = tmp_path / "claims.jsonl"
    _write_jsonl(
        path,
        [
            {"id": "a1", "claim": "X helps.", "label": "SUPPORTS"},
            {"claim_id": "a2", "text": "Y harms.", "gold_label": "refutes"},
            {"id": 33, "statement": "Z is unknown.", "verdict": "NEI"},
        ],
    )
    ds = load_dataset("mystery", path)
    assert ds.name == "mystery"
    assert [r.claim_id for r in ds.records] == ["a1", "a2", "33"]
    assert [r.gold_label for r in ds.records] == ["Supported", "Refuted", "NEI"]
    assert ds.records[0].dataset == "mystery"
    assert ds.records[0].split is None
    assert ds.label_set == ("NEI", "Refuted", "Supported")
    assert ds.counts() == {"NEI": 1, "Refuted": 1, "Supported": 1}


def test_load_profile_dataset_canonicalizes_name(tmp_path):
    path = tmp_path / "h.jsonl"
    _write_jsonl(path, [{"id": "h1", "claim": "C.", "label": "supported"}])
    ds = load_dataset("healthfc", path)
    assert ds.name == "HealthFC"
    assert ds.records[0].dataset == "HealthFC"
    assert ds.label_set == ("NEI", "Refuted", "Supported")
    assert ds.expected_counts == {"Supported": 202, "Refuted": 125, "NEI": 433}
    assert ds.split_sizes == {"train": 451, "validation": 151, "test": 151}


def test_load_tsv(tmp_path):
    path = tmp_path / "claims.tsv"
    path.write_text("t1\tX helps.\tSUPPORTS\nt2\tY harms.\tREFUTES\n", encoding="utf-8")
    ds = load_dataset("mystery", path)  # format sniffed from the extension
    assert [r.gold_label for r in ds.records] == ["Supported", "Refuted"]
    with pytest.raises(DatasetError, match="3 tab-separated cells"):
        bad = tmp_path / "bad.tsv"
        bad.write_text("only-one-cell\n", encoding="utf-8")
        load_dataset("mystery", bad)


def test_load_rejects_unknown_format(tmp_path):
    path = tmp_path / "claims.jsonl"
    _write_jsonl(path, [{"id": "a", "claim": "C.", "label": "NEI"}])
    with pytest.raises(DatasetError, match="unknown dataset format"):
        load_dataset("mystery", path, fmt="xml")


def test_load_rejects_duplicates_and_bad_rows(tmp_path):
    path = tmp_path / "claims.jsonl"
    _write_jsonl(
        path,
        [
            {"id": "a1", "claim": "X.", "label": "NEI"},
            {"id": "a1", "claim": "X again.", "label": "NEI"},
        ],
    )
    with pytest.raises(DatasetError, match="duplicate claim id"):
        load_dataset("mystery", path)

    path.write_text('{"id": "a1"}\n', encoding="utf-8")
    with pytest.raises(DatasetError, match="none of the keys"):
        load_dataset("mystery", path)

    path.write_text("{broken\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="line 1"):
        load_dataset("mystery", path)


def test_load_rejects_label_outside_profile_label_set(tmp_path):
    path = tmp_path / "b.jsonl"
    _write_jsonl(path, [{"id": "b1", "claim": "C.", "label": "NEI"}])
    with pytest.raises(DatasetError, match="outside"):
        load_dataset("bioasq", path)  # profile label set has no NEI


def test_strict_counts(tmp_path):
    path = tmp_path / "h.jsonl"
    _write_jsonl(
        path,
        [
            {"id": "h1", "claim": "A.", "label": "supported"},
            {"id": "h2", "claim": "B.", "label": "refuted"},
        ],
    )
    ds = load_dataset("healthfc", path)  # non-strict load is fine
    assert len(ds.records) == 2
    with pytest.raises(DatasetError, match="expected 202 Supported"):
        load_dataset("healthfc", path, strict_counts=True)
    with pytest.raises(DatasetError, match="no published counts"):
        load_dataset("mystery", path, strict_counts=True)


# -- splits -------------------------------------------------------------------


def _synthetic(n_sup, n_ref, n_nei, name="synthetic"):
    records = []
    for label, count in (("Supported", n_sup), ("Refuted", n_ref), ("NEI", n_nei)):
        for i in range(count):
            records.append(
                ClaimRecord(f"{label[:3].lower()}{i}", f"Claim {label} {i}.", label, name)
            )
    return DatasetSpec(name, ("NEI", "Refuted", "Supported"), records)


def test_generic_split_is_60_20_20_with_remainder_to_train():
    ds = _synthetic(50, 30, 20)
    train, val, test = split_dataset(ds)
    assert (len(train), len(val), len(test)) == (60, 20, 20)
    # stratification is exact here because every quota is integral
    def counts(split):
        out = {}
        for record in split:
            out[record.gold_label] = out.get(record.gold_label, 0) + 1
        return out

    assert counts(train) == {"Supported": 30, "Refuted": 18, "NEI": 12}
    assert counts(val) == {"Supported": 10, "Refuted": 6, "NEI": 4}
    assert counts(test) == {"Supported": 10, "Refuted": 6, "NEI": 4}
    for split_name, bucket in (("train", train), ("validation", val), ("test", test)):
        assert all(record.split == split_name for record in bucket)

    odd = _synthetic(7, 2, 2)  # 11 records: floor gives 2/2, train absorbs 7
    train, val, test = split_dataset(odd)
    assert (len(train), len(val), len(test)) == (7, 2, 2)


def test_split_determinism_and_seed_sensitivity():
    ds = _synthetic(40, 35, 25)
    first = split_dataset(ds, seed=7)
    second = split_dataset(ds, seed=7)
    assert [[r.claim_id for r in s] for s in first] == [
        [r.claim_id for r in s] for s in second
    ]
    different = split_dataset(ds, seed=8)
    assert [[r.claim_id for r in s] for s in first] != [
        [r.claim_id for r in s] for s in different
    ]


def test_split_is_a_partition():
    ds = _synthetic(13, 11, 9)
    train, val, test = split_dataset(ds, seed=5)
    ids = [r.claim_id for r in train + val + test]
    assert len(ids) == len(set(ids)) == 33


def test_healthfc_totals_leave_seven_unassigned(caplog):
    ds = _synthetic(202, 125, 433, name="HealthFC")
    ds.split_sizes = {"train": 451, "validation": 151, "test": 151}
    with caplog.at_level(logging.WARNING, logger="cer.datasets"):
        train, val, test = split_dataset(ds)
    assert (len(train), len(val), len(test)) == (451, 151, 151)
    assert 760 - (451 + 151 + 151) == 7
    assert any("7 record(s)" in r.message for r in caplog.records)


def test_split_sizes_exceeding_records_raise():
    ds = _synthetic(614, 131, 0, name="BioASQ-7b")
    ds.label_set = ("Refuted", "Supported")
    ds.split_sizes = {"train": 447, "validation": 150, "test": 150}  # 747 > 745
    with pytest.raises(DatasetError, match="need 747 records, dataset has 745"):
        split_dataset(ds)


def test_split_empty_dataset_raises():
    with pytest.raises(DatasetError, match="no records"):
        split_dataset(DatasetSpec("empty", ("NEI",), []))


# -- largest-remainder apportionment -----------------------------------------


def test_largest_remainder_hand_example():
    # quotas 4.2 / 2.8 / 3.0 -> floors 4/2/3, one leftover goes to the
    # largest fractional remainder (index 1)
    assert _largest_remainder([42, 28, 30], 10) == [4, 3, 3]
    assert _largest_remainder([1, 1, 1], 2) == [1, 1, 0]  # index ties go left
    with pytest.raises(DatasetError):
        _largest_remainder([0, 0], 1)


@given(
    st.lists(st.integers(min_value=0, max_value=500), min_size=1, max_size=8).filter(
        lambda w: sum(w) > 0
    ),
    st.integers(min_value=0, max_value=300),
)
def test_largest_remainder_properties(weights, total):
    total = min(total, sum(weights))
    alloc = _largest_remainder(weights, total)
    assert sum(alloc) == total
    assert all(a >= 0 for a in alloc)
    for a, w in zip(alloc, weights):
        quota = w * total / sum(weights)
        assert quota - 1 < a < quota + 1
