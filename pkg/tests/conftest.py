"""Shared fixtures and the acceptance-gate summary reporter."""

from __future__ import annotations

import json
import os

import pytest

from cer.corpus import build_units, ingest_corpus
from cer.datasets import ClaimRecord
from cer.sparse_index import build_sparse_index

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
CORPUS_PATH = os.path.join(DATA_DIR, "corpus.jsonl")
CLAIMS_PATH = os.path.join(DATA_DIR, "claims.jsonl")


@pytest.fixture(scope="session")
def corpus_path() -> str:
    return CORPUS_PATH


@pytest.fixture(scope="session")
def claims_path() -> str:
    return CLAIMS_PATH


@pytest.fixture(scope="session")
def corpus_units():
    return build_units(ingest_corpus(CORPUS_PATH).records)


@pytest.fixture(scope="session")
def sparse_index(corpus_units):
    return build_sparse_index(corpus_units)


@pytest.fixture(scope="session")
def fixture_claims() -> list[ClaimRecord]:
    out = []
    with open(CLAIMS_PATH, encoding="utf-8") as handle:
        for line in handle:
            row = json.loads(line)
            out.append(
                ClaimRecord(row["id"], row["claim"], row["label"], "fixture", "test")
            )
    return out


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance check, after the normal summary."""
    rows = []
    for outcome in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            when = getattr(report, "when", "call")
            if when != "call" and not (outcome == "error" or
                                       (outcome == "skipped" and when == "setup")):
                continue
            name = nodeid.split("::")[-1]
            status = {"passed": "PASS", "failed": "FAIL", "error": "FAIL",
                      "skipped": "SKIP"}[outcome]
            rows.append((name, status))
    if not rows:
        return
    rows.sort()
    terminalreporter.write_sep("-", "acceptance gate")
    for name, status in rows:
        terminalreporter.write_line(f"[acceptance] {name}: {status}")
