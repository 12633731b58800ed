"""Corpus ingestion, sentence segmentation, and token preprocessing.

A corpus is a set of documents (id, title, abstract). Retrieval operates
on sentence units, so each abstract is segmented into sentences that keep
a stable id of the form ``<doc_id>#<ordinal>``. Query and sentence text
share one preprocessing pipeline: compatibility normalization, lowercase,
alphanumeric tokenization, stopword removal, then suffix stripping.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources

from .errors import CorpusError
from .porter import stem

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    title: str
    abstract_text: str


@dataclass(frozen=True)
class SentenceUnit:
    sentence_id: str
    doc_id: str
    text: str
    char_length: int


@dataclass
class IngestResult:
    records: list[DocumentRecord]
    skipped: int

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def _load_wordlist(name: str) -> frozenset[str]:
    text = resources.files("cer.data").joinpath(name).read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


STOPWORDS = _load_wordlist("stopwords.txt")
ABBREVIATIONS = _load_wordlist("abbreviations.txt")


def ingest_corpus(path, fmt: str = "jsonl") -> IngestResult:
    """Read documents from a jsonl or tsv file.

    Malformed rows (bad syntax, missing or empty fields, duplicate ids)
    are skipped and counted, never silently dropped. Unreadable files
    raise the underlying OSError.
    """
    if fmt not in ("jsonl", "tsv"):
        raise CorpusError(f"unknown corpus format {fmt!r}, expected 'jsonl' or 'tsv'")
    records: list[DocumentRecord] = []
    seen: set[str] = set()
    skipped = 0
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            rec = _parse_row(line, line_no, fmt)
            if rec is None:
                skipped += 1
                continue
            if rec.doc_id in seen:
                log.warning("line %d: duplicate doc_id %r, row skipped", line_no, rec.doc_id)
                skipped += 1
                continue
            seen.add(rec.doc_id)
            records.append(rec)
    if skipped:
        log.warning("%s: skipped %d malformed row(s)", path, skipped)
    return IngestResult(records, skipped)


def _parse_row(line: str, line_no: int, fmt: str) -> DocumentRecord | None:
    if fmt == "jsonl":
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            log.warning("line %d: invalid JSON (%s), row skipped", line_no, exc.msg)
            return None
        if not isinstance(row, dict):
            log.warning("line %d: expected an object, row skipped", line_no)
            return None
        doc_id = row.get("doc_id") or row.get("id")
        title = row.get("title", "")
        abstract = row.get("abstract") or row.get("abstract_text") or row.get("text")
    else:
        cells = line.rstrip("\n").split("\t")
        if len(cells) < 3:
            log.warning("line %d: expected 3 tab-separated cells, row skipped", line_no)
            return None
        doc_id, title, abstract = cells[0], cells[1], cells[2]
    if not doc_id or not isinstance(doc_id, str):
        log.warning("line %d: missing doc_id, row skipped", line_no)
        return None
    if not abstract or not isinstance(abstract, str) or not abstract.strip():
        log.warning("line %d: missing or empty abstract, row skipped", line_no)
        return None
    if not isinstance(title, str):
        title = str(title)
    return DocumentRecord(doc_id=doc_id, title=title, abstract_text=abstract)


_ABBREV_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z.]*\.$")


def _ends_with_abbreviation(text: str) -> bool:
    """True when the text ends in a token like 'approx.' or 'e.g.'."""
    space = text.rfind(" ")
    chunk = text[space + 1 :]
    m = _ABBREV_TOKEN_RE.search(chunk)
    return m is not None and m.group(0).lower() in ABBREVIATIONS


def segment_sentences(text: str) -> list[str]:
    """Split text into sentences at ., ? or ! followed by whitespace and
    an uppercase letter, unless the period closes a known abbreviation.

    Whitespace is normalized to single spaces first, so joining the
    returned sentences with one space reproduces the normalized input.
    """
    norm = " ".join(text.split())
    if not norm:
        return []
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(norm)
    while i < n:
        ch = norm[i]
        if ch in ".?!" and i + 2 < n and norm[i + 1] == " " and norm[i + 2].isupper():
            if ch != "." or not _ends_with_abbreviation(norm[: i + 1]):
                sentences.append(norm[start : i + 1])
                start = i + 2
                i = start
                continue
        i += 1
    tail = norm[start:]
    if tail:
        sentences.append(tail)
    return sentences


def build_units(documents) -> list[SentenceUnit]:
    """Segment each document's abstract into sentence units.

    Sentence ids are ``<doc_id>#<ordinal>`` with ordinals starting at 0,
    so unit identity is stable across rebuilds of the same corpus.
    """
    units: list[SentenceUnit] = []
    for doc in documents:
        for ordinal, sentence in enumerate(segment_sentences(doc.abstract_text)):
            units.append(
                SentenceUnit(
                    sentence_id=f"{doc.doc_id}#{ordinal}",
                    doc_id=doc.doc_id,
                    text=sentence,
                    char_length=len(sentence),
                )
            )
    return units


def preprocess(text: str) -> list[str]:
    """Normalize, lowercase, tokenize, drop stopwords, stem.

    The output may be empty (e.g. for stopword-only input); callers
    decide how to treat empty token streams.
    """
    text = unicodedata.normalize("NFKC", text).lower()
    tokens = _TOKEN_RE.findall(text)
    return [stem(tok) for tok in tokens if tok not in STOPWORDS]
