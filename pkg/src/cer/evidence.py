"""Evidence selection for a claim and claim/evidence pair assembly."""

from __future__ import annotations

from dataclasses import dataclass

from .dense_index import DenseIndex, EmbeddingProvider, search_dense
from .errors import ConfigError
from .sparse_index import SparseIndex, search_sparse

SEPARATOR = " [SEP] "

RETRIEVAL_MODES = ("sparse", "dense")


@dataclass(frozen=True)
class EvidenceSentence:
    sentence_id: str
    text: str
    score: float
    rank: int


@dataclass
class EvidenceSet:
    claim_id: str
    hits: list[EvidenceSentence]

    @property
    def texts(self) -> list[str]:
        return [h.text for h in self.hits]


@dataclass(frozen=True)
class AssembledPair:
    text: str
    empty_evidence: bool


def retrieve_evidence(
    claim_text: str,
    mode: str = "sparse",
    k: int = 20,
    *,
    claim_id: str = "",
    sparse_index: SparseIndex | None = None,
    dense_index: DenseIndex | None = None,
    dense_provider: EmbeddingProvider | None = None,
) -> EvidenceSet:
    """Run one retrieval pass and resolve hit texts from the index."""
    if mode == "sparse":
        if sparse_index is None:
            raise ConfigError("sparse retrieval requested but no sparse index given")
        hits = search_sparse(claim_text, k, sparse_index)
        resolve = sparse_index.text_of
    elif mode == "dense":
        if dense_index is None or dense_provider is None:
            raise ConfigError(
                "dense retrieval requested but index or provider is missing"
            )
        hits = search_dense(claim_text, k, dense_index, dense_provider)
        lookup = dict(zip(dense_index.sentence_ids, dense_index.texts))
        resolve = lookup.__getitem__
    else:
        raise ConfigError(f"unknown retrieval mode {mode!r}, expected one of {RETRIEVAL_MODES}")
    sentences = [
        EvidenceSentence(h.sentence_id, resolve(h.sentence_id), h.score, h.rank)
        for h in hits
    ]
    return EvidenceSet(claim_id=claim_id, hits=sentences)


def assemble_pair(claim_text: str, evidence: EvidenceSet, m: int = 3) -> AssembledPair:
    """Join the claim with its top evidence: ``<claim> [SEP] <e1>, <e2>, <e3>``.

    Uses the top min(m, hits) evidence texts. With no evidence the
    separator still appears (``<claim> [SEP] ``) and the pair is flagged,
    so downstream records can carry the degenerate case explicitly.
    """
    top = evidence.texts[:m]
    return AssembledPair(
        text=claim_text + SEPARATOR + ", ".join(top),
        empty_evidence=not top,
    )


def split_pair(pair_text: str) -> tuple[str, str]:
    """Inverse of assemble_pair on the claim side: split on the first
    separator occurrence."""
    claim, _, rest = pair_text.partition(SEPARATOR)
    return claim, rest
