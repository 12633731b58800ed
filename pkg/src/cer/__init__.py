"""Evidence-grounded biomedical claim verification.

The pipeline has three stages — retrieve evidence sentences for a
claim (BM25 or dense cosine), reason over them with an LLM to get a
provisional label plus justification, then assign the final veracity
label (zero-shot passthrough or a trained classifier over TF-IDF
features of claim ⊕ evidence ⊕ justification) — plus an evaluation
harness (macro metrics, constant baselines, cross-dataset matrix,
prompt ablations).
"""

from __future__ import annotations

__version__ = "0.1.0"

from .config import RunConfig, load_config_file, resolve_config
from .corpus import (
    DocumentRecord,
    SentenceUnit,
    build_units,
    ingest_corpus,
    preprocess,
    segment_sentences,
)
from .datasets import (
    ClaimRecord,
    DatasetSpec,
    load_dataset,
    normalize_label,
    split_dataset,
)
from .dense_index import (
    DenseIndex,
    DenseRetriever,
    EmbeddingProvider,
    MockEmbeddingProvider,
    PrecomputedEmbeddingProvider,
    RemoteEmbeddingProvider,
    build_dense_index,
    cosine_similarity,
    load_dense_index,
    save_dense_index,
    search_dense,
)
from .errors import (
    CerError,
    ConfigError,
    CorpusError,
    DatasetError,
    IndexFormatError,
    ProviderError,
    SchemaError,
)
from .evaluation import (
    ablation_run,
    corpus_stats,
    cross_eval,
    drop_nei,
    run_baseline,
)
from .evidence import (
    SEPARATOR,
    AssembledPair,
    EvidenceSentence,
    EvidenceSet,
    assemble_pair,
    retrieve_evidence,
    split_pair,
)
from .metrics import EvalReport, LabelMetrics, macro_metrics
from .pipeline import (
    ClaimEvidence,
    classify_records,
    evaluate_records,
    read_evidence_file,
    reason_over_evidence,
    retrieve_for_claims,
    run_pipeline,
    write_evidence_file,
)
from .porter import stem
from .reasoning import (
    CallableLLMProvider,
    CannedLLMProvider,
    FixtureLLMProvider,
    HTTPLLMProvider,
    LLMProvider,
    PromptSpec,
    ReasoningOutput,
    ResponseCache,
    build_prompt,
    invoke_llm,
    parse_reasoning,
    parse_sections,
    prompt_hash,
)
from .sparse_index import (
    ScoredHit,
    SparseIndex,
    SparseRetriever,
    bm25_score,
    build_sparse_index,
    idf,
    load_sparse_index,
    save_sparse_index,
    search_sparse,
)
from .veracity import (
    TfidfNgramFeaturizer,
    TrainConfig,
    VeracityClassifier,
    VerdictRecord,
    read_interchange,
    train_classifier,
    write_interchange,
    zero_shot_classify,
)

__all__ = [
    "__version__",
    # config
    "RunConfig", "load_config_file", "resolve_config",
    # corpus
    "DocumentRecord", "SentenceUnit", "build_units", "ingest_corpus",
    "preprocess", "segment_sentences", "stem",
    # datasets
    "ClaimRecord", "DatasetSpec", "load_dataset", "normalize_label", "split_dataset",
    # retrieval
    "ScoredHit", "SparseIndex", "SparseRetriever", "bm25_score",
    "build_sparse_index", "idf", "load_sparse_index", "save_sparse_index",
    "search_sparse",
    "DenseIndex", "DenseRetriever", "EmbeddingProvider", "MockEmbeddingProvider",
    "PrecomputedEmbeddingProvider", "RemoteEmbeddingProvider", "build_dense_index",
    "cosine_similarity", "load_dense_index", "save_dense_index", "search_dense",
    # evidence
    "SEPARATOR", "AssembledPair", "EvidenceSentence", "EvidenceSet",
    "assemble_pair", "retrieve_evidence", "split_pair",
    # reasoning
    "CallableLLMProvider", "CannedLLMProvider", "FixtureLLMProvider",
    "HTTPLLMProvider", "LLMProvider", "PromptSpec", "ReasoningOutput",
    "ResponseCache", "build_prompt", "invoke_llm", "parse_reasoning",
    "parse_sections", "prompt_hash",
    # veracity
    "TfidfNgramFeaturizer", "TrainConfig", "VeracityClassifier", "VerdictRecord",
    "read_interchange", "train_classifier", "write_interchange", "zero_shot_classify",
    # pipeline
    "ClaimEvidence", "classify_records", "evaluate_records", "read_evidence_file",
    "reason_over_evidence", "retrieve_for_claims", "run_pipeline", "write_evidence_file",
    # metrics + evaluation
    "EvalReport", "LabelMetrics", "macro_metrics",
    "ablation_run", "corpus_stats", "cross_eval", "drop_nei", "run_baseline",
    # errors
    "CerError", "ConfigError", "CorpusError", "DatasetError",
    "IndexFormatError", "ProviderError", "SchemaError",
]
