"""Dense retrieval: embedding providers, cosine scoring, flat index.

Search is exhaustive over all stored vectors. Vectors are held in
float32; similarity accumulates in float64 so results do not depend on
how the index was chunked at build time.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
import time
from dataclasses import dataclass

import numpy as np
import requests
from sklearn.base import BaseEstimator

from .errors import ConfigError, CorpusError, IndexFormatError, ProviderError
from .sparse_index import ScoredHit

log = logging.getLogger(__name__)

_MAGIC = b"CERDIDX1"

EMBED_ENDPOINT_VAR = "CER_EMBED_ENDPOINT"


def cosine_similarity(q, d) -> float:
    """Cosine of the angle between two vectors, accumulated in float64.

    Raises ValueError on dimension mismatch or a zero-norm operand.
    """
    q = np.asarray(q, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if q.shape != d.shape or q.ndim != 1:
        raise ValueError(f"dimension mismatch: {q.shape} vs {d.shape}")
    qn = float(np.linalg.norm(q))
    dn = float(np.linalg.norm(d))
    if qn == 0.0 or dn == 0.0:
        raise ValueError("cosine similarity is undefined for a zero-norm vector")
    return float(np.dot(q, d) / (qn * dn))


class EmbeddingProvider:
    """Maps text to fixed-width vectors. tag identifies the model so an
    index can refuse queries embedded by a different provider."""

    tag: str = "base"
    dimension: int = 0

    def embed_batch(self, texts) -> np.ndarray:
        raise NotImplementedError

    def embed(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]


class MockEmbeddingProvider(EmbeddingProvider):
    """Deterministic stand-in: expands a SHA-256 of the text into
    uniform values in [-1, 1). Useful for tests and offline runs."""

    def __init__(self, dimension: int = 32):
        if dimension <= 0:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.tag = f"mock-{dimension}"

    def embed_batch(self, texts) -> np.ndarray:
        out = np.empty((len(texts), self.dimension), dtype=np.float32)
        for i, text in enumerate(texts):
            out[i] = self._expand(text)
        return out

    def _expand(self, text: str) -> np.ndarray:
        digest_input = text.encode("utf-8")
        words = []
        counter = 0
        while len(words) < self.dimension:
            block = hashlib.sha256(digest_input + counter.to_bytes(4, "little")).digest()
            for off in range(0, 32, 4):
                words.append(int.from_bytes(block[off : off + 4], "little"))
            counter += 1
        arr = np.array(words[: self.dimension], dtype=np.float64)
        vec = (arr / 2**31) - 1.0  # uniform in [-1, 1)
        if not np.any(vec):
            vec[0] = 1.0  # never hand out a zero vector
        return vec.astype(np.float32)


class PrecomputedEmbeddingProvider(EmbeddingProvider):
    """Serves vectors from a JSONL file: a header line with provider_tag
    and dimension, then {"text": ..., "vector": [...]} rows."""

    def __init__(self, path):
        import json

        self._table: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as handle:
            header = json.loads(handle.readline())
            self.tag = header["provider_tag"]
            self.dimension = int(header["dimension"])
            for line_no, line in enumerate(handle, start=2):
                if not line.strip():
                    continue
                row = json.loads(line)
                vec = np.asarray(row["vector"], dtype=np.float32)
                if vec.shape != (self.dimension,):
                    raise ProviderError(
                        f"{path} line {line_no}: vector has {vec.size} values, "
                        f"header declares {self.dimension}"
                    )
                self._table[row["text"]] = vec

    def embed_batch(self, texts) -> np.ndarray:
        out = np.empty((len(texts), self.dimension), dtype=np.float32)
        for i, text in enumerate(texts):
            vec = self._table.get(text)
            if vec is None:
                raise ProviderError(f"no precomputed vector for text: {text[:80]!r}")
            out[i] = vec
        return out


class RemoteEmbeddingProvider(EmbeddingProvider):
    """HTTP provider: POST {"texts": [...]} -> {"vectors": [[...], ...]}.

    The endpoint defaults to the CER_EMBED_ENDPOINT environment variable.
    Transient failures (429, 5xx, timeouts) are retried with exponential
    backoff; other 4xx responses fail at once with a body excerpt.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        tag: str = "remote",
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        sleep=time.sleep,
        batch_size: int = 64,
    ):
        endpoint = endpoint or os.environ.get(EMBED_ENDPOINT_VAR)
        if not endpoint:
            raise ConfigError(
                f"no embedding endpoint: pass one or set {EMBED_ENDPOINT_VAR}"
            )
        self.endpoint = endpoint
        self.tag = tag
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.sleep = sleep
        self.batch_size = batch_size
        self.dimension = 0  # learned from the first response

    def embed_batch(self, texts) -> np.ndarray:
        chunks = []
        for start in range(0, len(texts), self.batch_size):
            chunk = list(texts[start : start + self.batch_size])
            chunks.append(self._post(chunk))
        vectors = np.concatenate(chunks) if chunks else np.empty((0, 0), np.float32)
        return vectors

    def _post(self, texts: list[str]) -> np.ndarray:
        attempt = 0
        while True:
            attempt += 1
            try:
                resp = requests.post(
                    self.endpoint, json={"texts": texts}, timeout=self.timeout
                )
            except requests.RequestException as exc:
                if attempt > self.max_retries:
                    raise ProviderError(
                        f"embedding endpoint unreachable after {attempt} attempts: {exc}",
                        retryable=True,
                    ) from exc
                self._backoff(attempt)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                if attempt > self.max_retries:
                    raise ProviderError(
                        f"embedding endpoint returned {resp.status_code} "
                        f"after {attempt} attempts",
                        status=resp.status_code,
                        retryable=True,
                    )
                self._backoff(attempt)
                continue
            if resp.status_code != 200:
                raise ProviderError(
                    f"embedding endpoint returned {resp.status_code}: "
                    f"{resp.text[:200]}",
                    status=resp.status_code,
                )
            payload = resp.json()
            vectors = np.asarray(payload["vectors"], dtype=np.float32)
            if vectors.ndim != 2 or vectors.shape[0] != len(texts):
                raise ProviderError(
                    f"embedding endpoint returned shape {vectors.shape} "
                    f"for {len(texts)} texts"
                )
            if self.dimension == 0:
                self.dimension = int(vectors.shape[1])
            elif vectors.shape[1] != self.dimension:
                raise ProviderError(
                    f"embedding dimension changed mid-run: "
                    f"{vectors.shape[1]} vs {self.dimension}"
                )
            return vectors

    def _backoff(self, attempt: int) -> None:
        delay = self.backoff_base * 2 ** (attempt - 1)
        log.info("embedding attempt %d failed, retrying in %.1fs", attempt, delay)
        self.sleep(delay)


@dataclass
class DenseIndex:
    sentence_ids: list[str]
    texts: list[str]
    vectors: np.ndarray  # (n, dimension) float32
    provider_tag: str

    @property
    def size(self) -> int:
        return len(self.sentence_ids)

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])


def build_dense_index(units, provider: EmbeddingProvider) -> DenseIndex:
    units = list(units)
    if not units:
        raise CorpusError("cannot build a dense index from an empty unit sequence")
    texts = [u.text for u in units]
    vectors = provider.embed_batch(texts).astype(np.float32, copy=False)
    if not np.all(np.isfinite(vectors)):
        bad = int(np.argwhere(~np.isfinite(vectors).all(axis=1))[0][0])
        raise ProviderError(f"non-finite embedding for unit {units[bad].sentence_id}")
    norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
    if np.any(norms == 0.0):
        bad = int(np.argmax(norms == 0.0))
        raise ProviderError(f"zero-norm embedding for unit {units[bad].sentence_id}")
    return DenseIndex(
        sentence_ids=[u.sentence_id for u in units],
        texts=texts,
        vectors=vectors,
        provider_tag=provider.tag,
    )


def search_by_vector(query_vector, k: int, index: DenseIndex) -> list[ScoredHit]:
    """Exhaustive cosine scan; ties broken by ascending sentence_id."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    q = np.asarray(query_vector, dtype=np.float64).reshape(-1)
    if q.shape[0] != index.dimension:
        raise ValueError(
            f"query has dimension {q.shape[0]}, index stores {index.dimension}"
        )
    qn = float(np.linalg.norm(q))
    if qn == 0.0:
        raise ValueError("cosine similarity is undefined for a zero-norm query")
    mat = index.vectors.astype(np.float64)
    norms = np.linalg.norm(mat, axis=1)
    sims = (mat @ q) / (norms * qn)
    order = sorted(range(index.size), key=lambda i: (-sims[i], index.sentence_ids[i]))
    return [
        ScoredHit(sentence_id=index.sentence_ids[i], score=float(sims[i]), rank=rank)
        for rank, i in enumerate(order[:k])
    ]


def search_dense(
    query: str, k: int, index: DenseIndex, provider: EmbeddingProvider
) -> list[ScoredHit]:
    if provider.tag != index.provider_tag:
        raise ConfigError(
            f"index was built with provider {index.provider_tag!r}, "
            f"query uses {provider.tag!r}"
        )
    return search_by_vector(provider.embed(query), k, index)


def save_dense_index(index: DenseIndex, path) -> None:
    """Versioned little-endian binary layout; see README for the format."""
    tag_raw = index.provider_tag.encode("utf-8")
    with open(path, "wb") as out:
        out.write(_MAGIC)
        out.write(struct.pack("<I", index.dimension))
        out.write(struct.pack("<Q", index.size))
        out.write(struct.pack("<I", len(tag_raw)))
        out.write(tag_raw)
        out.write(np.ascontiguousarray(index.vectors, dtype="<f4").tobytes())
        for sid, text in zip(index.sentence_ids, index.texts):
            for value in (sid, text):
                raw = value.encode("utf-8")
                out.write(struct.pack("<I", len(raw)))
                out.write(raw)


def load_dense_index(path) -> DenseIndex:
    with open(path, "rb") as handle:
        data = handle.read()
    if data[:8] != _MAGIC:
        raise IndexFormatError(f"{path}: bad magic {data[:8]!r}, expected {_MAGIC!r}")
    try:
        offset = 8
        (dimension,) = struct.unpack_from("<I", data, offset)
        offset += 4
        (count,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        (tag_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        provider_tag = data[offset : offset + tag_len].decode("utf-8")
        offset += tag_len
        vec_bytes = count * dimension * 4
        if offset + vec_bytes > len(data):
            raise IndexFormatError(
                f"{path}: header declares {count} x {dimension} vectors "
                f"but the payload is too short"
            )
        vectors = np.frombuffer(
            data, dtype="<f4", count=count * dimension, offset=offset
        ).reshape(count, dimension)
        offset += vec_bytes
        sentence_ids, texts = [], []
        for _ in range(count):
            (n,) = struct.unpack_from("<I", data, offset)
            offset += 4
            sentence_ids.append(data[offset : offset + n].decode("utf-8"))
            offset += n
            (n,) = struct.unpack_from("<I", data, offset)
            offset += 4
            texts.append(data[offset : offset + n].decode("utf-8"))
            offset += n
    except struct.error as exc:
        raise IndexFormatError(f"{path}: truncated index file ({exc})") from exc
    if offset != len(data):
        raise IndexFormatError(f"{path}: {len(data) - offset} trailing bytes")
    return DenseIndex(sentence_ids, texts, vectors.copy(), provider_tag)


class DenseRetriever(BaseEstimator):
    """Estimator-style wrapper around a dense index and its provider."""

    def __init__(self, provider: EmbeddingProvider | None = None):
        self.provider = provider

    def fit(self, units, y=None):
        if self.provider is None:
            raise ConfigError("DenseRetriever needs an embedding provider to fit")
        self.index_ = build_dense_index(units, self.provider)
        return self

    def search(self, query: str, k: int = 20) -> list[ScoredHit]:
        self._check_fitted()
        if self.provider is None:
            raise ConfigError("DenseRetriever needs an embedding provider to search")
        return search_dense(query, k, self.index_, self.provider)

    def save(self, path) -> None:
        self._check_fitted()
        save_dense_index(self.index_, path)

    @classmethod
    def from_file(cls, path, provider: EmbeddingProvider | None = None) -> "DenseRetriever":
        retriever = cls(provider=provider)
        retriever.index_ = load_dense_index(path)
        if provider is not None and provider.dimension not in (0, retriever.index_.dimension):
            raise ConfigError(
                f"provider dimension {provider.dimension} does not match "
                f"index dimension {retriever.index_.dimension}"
            )
        return retriever

    def _check_fitted(self):
        if not hasattr(self, "index_"):
            raise CorpusError("retriever is not fitted: call fit() or from_file() first")
