"""Sparse retrieval over sentence units: inverted index + BM25 ranking.

Scores follow the classic formulation with natural-log IDF computed as
ln((N - n_t + 0.5) / (n_t + 0.5)). The IDF is deliberately unclamped, so
terms present in more than half of the units contribute negatively.
Candidates are the units sharing at least one query term; everything
else has score 0 and is never returned.
"""

from __future__ import annotations

import math
import struct
from bisect import bisect_left
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator

from .corpus import SentenceUnit, preprocess
from .errors import CorpusError, IndexFormatError

_MAGIC = b"CERSIDX1"


@dataclass(frozen=True)
class ScoredHit:
    sentence_id: str
    score: float
    rank: int


@dataclass
class SparseIndex:
    sentence_ids: list[str]
    texts: list[str]
    doc_lengths: list[int]
    postings: dict[str, list[tuple[int, int]]]  # term -> [(ordinal, tf)], ordinal ascending
    avgdl: float
    k1: float = 1.2
    b: float = 0.75
    _ordinal_of: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._ordinal_of:
            self._ordinal_of = {sid: i for i, sid in enumerate(self.sentence_ids)}

    @property
    def size(self) -> int:
        return len(self.sentence_ids)

    def text_of(self, sentence_id: str) -> str:
        return self.texts[self._ordinal_of[sentence_id]]


def build_sparse_index(units, k1: float = 1.2, b: float = 0.75) -> SparseIndex:
    """Index a sequence of SentenceUnit for BM25 search."""
    if k1 <= 0:
        raise ValueError(f"k1 must be positive, got {k1}")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"b must be in [0, 1], got {b}")
    units = list(units)
    if not units:
        raise CorpusError("cannot build a sparse index from an empty unit sequence")
    sentence_ids = []
    texts = []
    doc_lengths = []
    postings: dict[str, list[tuple[int, int]]] = {}
    for ordinal, unit in enumerate(units):
        tokens = preprocess(unit.text)
        sentence_ids.append(unit.sentence_id)
        texts.append(unit.text)
        doc_lengths.append(len(tokens))
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for term, tf in counts.items():
            postings.setdefault(term, []).append((ordinal, tf))
    # stopword-only units still count toward N and avgdl
    avgdl = sum(doc_lengths) / len(doc_lengths)
    return SparseIndex(sentence_ids, texts, doc_lengths, postings, avgdl, k1, b)


def idf(term: str, index: SparseIndex) -> float:
    """Inverse document frequency of an already-preprocessed term."""
    n_t = len(index.postings.get(term, ()))
    return idf_from_counts(index.size, n_t)


def idf_from_counts(n_units: int, n_containing: int) -> float:
    return math.log((n_units - n_containing + 0.5) / (n_containing + 0.5))


def _term_frequency(index: SparseIndex, term: str, ordinal: int) -> int:
    plist = index.postings.get(term)
    if not plist:
        return 0
    pos = bisect_left(plist, (ordinal, 0))
    if pos < len(plist) and plist[pos][0] == ordinal:
        return plist[pos][1]
    return 0


def bm25_score(query_tokens, ordinal: int, index: SparseIndex) -> float:
    """Score one unit against a token multiset; repeated query terms
    contribute once per occurrence."""
    k1, b = index.k1, index.b
    length_norm = 1.0 - b + b * index.doc_lengths[ordinal] / index.avgdl
    score = 0.0
    for term in query_tokens:
        tf = _term_frequency(index, term, ordinal)
        if tf == 0:
            continue
        term_idf = idf(term, index)
        score += term_idf * tf * (k1 + 1.0) / (tf + k1 * length_norm)
    return score


def search_sparse(query: str, k: int, index: SparseIndex) -> list[ScoredHit]:
    """Top-k units by BM25, ties broken by ascending sentence_id.

    A query with no indexed term (or k=0) returns an empty list.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    tokens = preprocess(query)
    scores: dict[int, float] = {}
    for term in tokens:
        plist = index.postings.get(term)
        if not plist:
            continue
        term_idf = idf_from_counts(index.size, len(plist))
        k1, b = index.k1, index.b
        for ordinal, tf in plist:
            length_norm = 1.0 - b + b * index.doc_lengths[ordinal] / index.avgdl
            contribution = term_idf * tf * (k1 + 1.0) / (tf + k1 * length_norm)
            scores[ordinal] = scores.get(ordinal, 0.0) + contribution
    ranked = sorted(
        scores.items(), key=lambda item: (-item[1], index.sentence_ids[item[0]])
    )[:k]
    return [
        ScoredHit(sentence_id=index.sentence_ids[ordinal], score=score, rank=rank)
        for rank, (ordinal, score) in enumerate(ranked)
    ]


def save_sparse_index(index: SparseIndex, path) -> None:
    """Versioned little-endian binary layout; see README for the format."""
    with open(path, "wb") as out:
        out.write(_MAGIC)
        out.write(struct.pack("<Q", index.size))
        out.write(struct.pack("<ddd", index.avgdl, index.k1, index.b))
        for sid, text, dl in zip(index.sentence_ids, index.texts, index.doc_lengths):
            _write_str(out, sid)
            _write_str(out, text)
            out.write(struct.pack("<I", dl))
        terms = sorted(index.postings)
        out.write(struct.pack("<Q", len(terms)))
        for term in terms:
            _write_str(out, term)
            plist = index.postings[term]
            out.write(struct.pack("<Q", len(plist)))
            for ordinal, tf in plist:
                out.write(struct.pack("<II", ordinal, tf))


def load_sparse_index(path) -> SparseIndex:
    with open(path, "rb") as handle:
        data = handle.read()
    if data[:8] != _MAGIC:
        raise IndexFormatError(
            f"{path}: bad magic {data[:8]!r}, expected {_MAGIC!r}"
        )
    try:
        offset = 8
        (n_units,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        avgdl, k1, b = struct.unpack_from("<ddd", data, offset)
        offset += 24
        sentence_ids, texts, doc_lengths = [], [], []
        for _ in range(n_units):
            sid, offset = _read_str(data, offset)
            text, offset = _read_str(data, offset)
            (dl,) = struct.unpack_from("<I", data, offset)
            offset += 4
            sentence_ids.append(sid)
            texts.append(text)
            doc_lengths.append(dl)
        (n_terms,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        postings: dict[str, list[tuple[int, int]]] = {}
        for _ in range(n_terms):
            term, offset = _read_str(data, offset)
            (n_postings,) = struct.unpack_from("<Q", data, offset)
            offset += 8
            plist = []
            for _ in range(n_postings):
                ordinal, tf = struct.unpack_from("<II", data, offset)
                offset += 8
                if ordinal >= n_units:
                    raise IndexFormatError(
                        f"{path}: posting for {term!r} references unit {ordinal} "
                        f"but the index holds {n_units}"
                    )
                plist.append((ordinal, tf))
            postings[term] = plist
    except struct.error as exc:
        raise IndexFormatError(f"{path}: truncated index file ({exc})") from exc
    if offset != len(data):
        raise IndexFormatError(f"{path}: {len(data) - offset} trailing bytes")
    return SparseIndex(sentence_ids, texts, doc_lengths, postings, avgdl, k1, b)


def _write_str(out, value: str) -> None:
    raw = value.encode("utf-8")
    out.write(struct.pack("<I", len(raw)))
    out.write(raw)


def _read_str(data: bytes, offset: int) -> tuple[str, int]:
    (length,) = struct.unpack_from("<I", data, offset)
    offset += 4
    if offset + length > len(data):
        raise IndexFormatError("truncated string field")
    return data[offset : offset + length].decode("utf-8"), offset + length


class SparseRetriever(BaseEstimator):
    """Estimator-style wrapper: fit on units, then search queries.

    Parameters mirror build_sparse_index; get_params/set_params follow
    the scikit-learn convention so the retriever can sit in grid
    searches next to ordinary estimators.
    """

    def __init__(self, k1: float = 1.2, b: float = 0.75):
        self.k1 = k1
        self.b = b

    def fit(self, units, y=None):
        self.index_ = build_sparse_index(units, k1=self.k1, b=self.b)
        return self

    def search(self, query: str, k: int = 20) -> list[ScoredHit]:
        self._check_fitted()
        return search_sparse(query, k, self.index_)

    def save(self, path) -> None:
        self._check_fitted()
        save_sparse_index(self.index_, path)

    @classmethod
    def from_file(cls, path) -> "SparseRetriever":
        index = load_sparse_index(path)
        retriever = cls(k1=index.k1, b=index.b)
        retriever.index_ = index
        return retriever

    def _check_fitted(self):
        if not hasattr(self, "index_"):
            raise CorpusError("retriever is not fitted: call fit() or from_file() first")
