"""Final label assignment and the interchange format that carries it.

Two prediction paths share the VerdictRecord schema: a zero-shot path
(pass the reasoning label through, or ask an external scorer) and an
internal trainable classifier. The classifier is multinomial logistic
regression over TF-IDF n-grams of claim, evidence and justification,
trained by full-batch gradient descent on the negative log-likelihood
with an L2 penalty, selecting the epoch with the best validation
macro-F1.
"""

from __future__ import annotations

import json
import logging
import math
import struct
from dataclasses import dataclass, field

import numpy as np
import requests
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import preprocess
from .errors import DatasetError, IndexFormatError, ProviderError, SchemaError
from .metrics import macro_metrics

log = logging.getLogger(__name__)

LABELS = ("NEI", "Refuted", "Supported")  # lexicographic, used for one-hots and ties
SPLITS = ("train", "validation", "test")
FLAGS = ("empty_evidence", "parse_failed")
MAX_EVIDENCE = 3

_MODEL_MAGIC = b"CERVMDL1"

# interchange schema: (field, required). Serialization keeps this order.
_SCHEMA = (
    ("claim_id", True),
    ("claim", True),
    ("dataset", True),
    ("split", True),
    ("gold_label", False),
    ("evidence", True),
    ("justification", True),
    ("llm_label", True),
    ("predicted_label", False),
    ("probabilities", False),
    ("flags", True),
)


@dataclass
class VerdictRecord:
    claim_id: str
    claim: str
    dataset: str
    split: str
    evidence: list[str]
    justification: str
    llm_label: str
    gold_label: str | None = None
    predicted_label: str | None = None
    probabilities: dict[str, float] | None = None
    flags: set[str] = field(default_factory=set)

    def validate(self, line: int | None = None) -> None:
        def fail(field_name: str, message: str):
            raise SchemaError(message, line=line, field=field_name)

        for name in ("claim_id", "claim", "dataset", "justification"):
            value = getattr(self, name)
            if not isinstance(value, str):
                fail(name, f"expected a string, got {type(value).__name__}")
        if not self.claim_id:
            fail("claim_id", "must be non-empty")
        if self.split not in SPLITS:
            fail("split", f"got {self.split!r}, expected one of {SPLITS}")
        if not isinstance(self.evidence, list) or not all(
            isinstance(e, str) for e in self.evidence
        ):
            fail("evidence", "expected a list of strings")
        if len(self.evidence) > MAX_EVIDENCE:
            fail("evidence", f"at most {MAX_EVIDENCE} evidence strings, got {len(self.evidence)}")
        if self.llm_label not in LABELS:
            fail("llm_label", f"got {self.llm_label!r}, expected one of {LABELS}")
        for name in ("gold_label", "predicted_label"):
            value = getattr(self, name)
            if value is not None and value not in LABELS:
                fail(name, f"got {value!r}, expected one of {LABELS}")
        if not self.flags <= set(FLAGS):
            fail("flags", f"unknown flags {sorted(self.flags - set(FLAGS))}")
        if self.probabilities is not None:
            probs = self.probabilities
            if not isinstance(probs, dict) or not probs:
                fail("probabilities", "expected a non-empty label → probability map")
            for key, value in probs.items():
                if key not in LABELS:
                    fail("probabilities", f"unknown label {key!r}")
                if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                    fail("probabilities", f"value for {key!r} must be in [0, 1]")
            total = math.fsum(probs.values())
            if abs(total - 1.0) > 1e-9:
                fail("probabilities", f"sum to {total!r}, expected 1 within 1e-9")
            if self.predicted_label is not None:
                best = max(probs.values())
                argmax = min(lab for lab, p in probs.items() if p == best)
                if self.predicted_label != argmax:
                    fail(
                        "predicted_label",
                        f"{self.predicted_label!r} is not the probability argmax {argmax!r}",
                    )

    def to_json_dict(self) -> dict:
        out: dict = {}
        for name, _ in _SCHEMA:
            value = getattr(self, name)
            if value is None:
                continue
            if name == "flags":
                value = sorted(value)
            elif name == "probabilities":
                value = {k: value[k] for k in sorted(value)}
            out[name] = value
        return out

    @classmethod
    def from_json_dict(cls, row: dict, line: int | None = None) -> "VerdictRecord":
        if not isinstance(row, dict):
            raise SchemaError("expected a JSON object", line=line)
        known = {name for name, _ in _SCHEMA}
        for key in row:
            if key not in known:
                raise SchemaError("unknown field", line=line, field=key)
        for name, required in _SCHEMA:
            if required and name not in row:
                raise SchemaError("missing required field", line=line, field=name)
        flags = row.get("flags", [])
        if not isinstance(flags, list):
            raise SchemaError("expected a list", line=line, field="flags")
        record = cls(
            claim_id=row.get("claim_id"),
            claim=row.get("claim"),
            dataset=row.get("dataset"),
            split=row.get("split"),
            gold_label=row.get("gold_label"),
            evidence=row.get("evidence"),
            justification=row.get("justification"),
            llm_label=row.get("llm_label"),
            predicted_label=row.get("predicted_label"),
            probabilities=row.get("probabilities"),
            flags=set(flags),
        )
        record.validate(line=line)
        return record


def write_interchange(records, path) -> None:
    """Serialize records as JSONL after validating every one of them."""
    records = list(records)
    for record in records:
        record.validate()
    with open(path, "w", encoding="utf-8") as out:
        for record in records:
            out.write(json.dumps(record.to_json_dict(), ensure_ascii=False))
            out.write("\n")


def read_interchange(path) -> list[VerdictRecord]:
    """Parse and validate JSONL; errors name the offending line and field."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line=line_no) from exc
            records.append(VerdictRecord.from_json_dict(row, line=line_no))
    return records


def _record_text(record: VerdictRecord) -> str:
    return f"{record.claim} {' '.join(record.evidence)} {record.justification}"


def _ngrams(tokens: list[str]) -> list[str]:
    grams = list(tokens)
    grams.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    return grams


class TfidfNgramFeaturizer(BaseEstimator, TransformerMixin):
    """TF-IDF over unigrams+bigrams of claim/evidence/justification text,
    plus a 3-slot one-hot of the reasoning label.

    The n-gram block of each row is L2-normalized; the one-hot slots
    stay at weight 1. The vocabulary comes from the fit() records only,
    so the training split alone decides the feature space.
    """

    def fit(self, records, y=None):
        df: dict[str, int] = {}
        n_docs = 0
        for record in records:
            n_docs += 1
            for gram in set(_ngrams(preprocess(_record_text(record)))):
                df[gram] = df.get(gram, 0) + 1
        self.vocabulary_ = {gram: i for i, gram in enumerate(sorted(df))}
        self.idf_ = np.array(
            [math.log((1 + n_docs) / (1 + df[g])) + 1.0 for g in sorted(df)],
            dtype=np.float64,
        )
        self.n_features_ = len(self.vocabulary_) + len(LABELS)
        return self

    def transform(self, records) -> sp.csr_matrix:
        self._check_fitted()
        records = list(records)
        rows, cols, vals = [], [], []
        n_vocab = len(self.vocabulary_)
        for r, record in enumerate(records):
            counts: dict[int, int] = {}
            for gram in _ngrams(preprocess(_record_text(record))):
                idx = self.vocabulary_.get(gram)
                if idx is not None:  # unknown n-grams ignored
                    counts[idx] = counts.get(idx, 0) + 1
            weights = {idx: tf * self.idf_[idx] for idx, tf in counts.items()}
            norm = math.sqrt(math.fsum(w * w for w in weights.values()))
            for idx in sorted(weights):
                rows.append(r)
                cols.append(idx)
                vals.append(weights[idx] / norm)
            rows.append(r)
            cols.append(n_vocab + LABELS.index(record.llm_label))
            vals.append(1.0)
        return sp.csr_matrix(
            (vals, (rows, cols)), shape=(len(records), self.n_features_)
        )

    def _check_fitted(self):
        if not hasattr(self, "vocabulary_"):
            raise DatasetError("featurizer is not fitted")


def featurize(record: VerdictRecord, featurizer: TfidfNgramFeaturizer) -> sp.csr_matrix:
    """One-record convenience wrapper around the fitted featurizer."""
    return featurizer.transform([record])


def loss_and_grad(weights, bias, X, y_indices, l2: float):
    """Sum-form negative log-likelihood with L2 penalty, plus gradients.

    loss = Σ_i -log P(y_i | x_i) + (λ/2)·||W||²; the bias is unpenalized.
    The per-row NLL uses a max-shifted log-sum-exp and the total is an
    exact (fsum) reduction, so the zero-weight loss is n·ln(K) to the
    last bit.
    """
    logits = np.asarray(X @ weights.T) + bias
    shift = logits.max(axis=1, keepdims=True)
    z = logits - shift
    exp_z = np.exp(z)
    denom = exp_z.sum(axis=1)
    row_idx = np.arange(logits.shape[0])
    nll = np.log(denom) - z[row_idx, y_indices]
    penalty = 0.5 * l2 * float(np.sum(weights * weights))
    loss = math.fsum(nll.tolist()) + penalty
    probs = exp_z / denom[:, None]
    probs[row_idx, y_indices] -= 1.0  # now P - Y
    grad_w = np.asarray((X.T @ probs)).T + l2 * weights
    grad_b = probs.sum(axis=0)
    return loss, grad_w, grad_b


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    max_epochs: int = 200
    patience: int = 10
    seed: int = 42


class VeracityClassifier(BaseEstimator):
    """Multinomial logistic regression with early stopping on validation
    macro-F1. Deterministic: zero initialization, full-batch updates."""

    def __init__(
        self,
        learning_rate: float = 0.1,
        l2: float = 1e-4,
        max_epochs: int = 200,
        patience: int = 10,
        seed: int = 42,
    ):
        self.learning_rate = learning_rate
        self.l2 = l2
        self.max_epochs = max_epochs
        self.patience = patience
        self.seed = seed

    def fit(self, train_records, val_records=()):
        train_records = list(train_records)
        val_records = list(val_records)
        if not train_records:
            raise DatasetError("train split is empty")
        for record in train_records:
            if record.gold_label is None:
                raise DatasetError(f"train record {record.claim_id!r} has no gold_label")
        label_set = tuple(sorted({r.gold_label for r in train_records}))
        if len(label_set) < 2:
            raise DatasetError(
                f"train split holds a single class {label_set[0]!r}; nothing to learn"
            )
        for record in val_records:
            if record.gold_label is None:
                raise DatasetError(f"val record {record.claim_id!r} has no gold_label")
            if record.gold_label not in label_set:
                raise DatasetError(
                    f"val record {record.claim_id!r} has label {record.gold_label!r} "
                    f"absent from the train label set {label_set}"
                )
        self.label_set_ = label_set
        self.featurizer_ = TfidfNgramFeaturizer().fit(train_records)
        X = self.featurizer_.transform(train_records)
        y = np.array([label_set.index(r.gold_label) for r in train_records])
        n, k = X.shape[0], len(label_set)
        weights = np.zeros((k, self.featurizer_.n_features_), dtype=np.float64)
        bias = np.zeros(k, dtype=np.float64)
        X_val = self.featurizer_.transform(val_records) if val_records else None
        gold_val = [r.gold_label for r in val_records]

        best_f1 = -1.0
        best = (weights.copy(), bias.copy(), 0)
        stale = 0
        train_loss: list[float] = []
        val_f1: list[float] = []
        for epoch in range(1, self.max_epochs + 1):
            loss, grad_w, grad_b = loss_and_grad(weights, bias, X, y, self.l2)
            train_loss.append(loss)
            weights = weights - self.learning_rate * grad_w / n
            bias = bias - self.learning_rate * grad_b / n
            if X_val is not None:
                predicted = self._predict_labels(weights, bias, X_val)
                f1 = macro_metrics(gold_val, predicted, label_set).macro_f1
                val_f1.append(f1)
                if f1 > best_f1:
                    best_f1 = f1
                    best = (weights.copy(), bias.copy(), epoch)
                    stale = 0
                else:
                    stale += 1
                    if stale >= self.patience:
                        log.info(
                            "early stop at epoch %d (no val macro-F1 gain in %d epochs)",
                            epoch, self.patience,
                        )
                        break
            else:
                best = (weights, bias, epoch)
        self.weights_, self.bias_, self.best_epoch_ = best
        self.history_ = {"train_loss": train_loss, "val_macro_f1": val_f1}
        self.trained_on_ = train_records[0].dataset
        return self

    def _predict_labels(self, weights, bias, X) -> list[str]:
        logits = np.asarray(X @ weights.T) + bias
        out = []
        for row in logits:
            best = row.max()
            out.append(min(self.label_set_[i] for i in np.flatnonzero(row == best)))
        return out

    def predict_record(self, record: VerdictRecord) -> tuple[str, dict[str, float]]:
        self._check_fitted()
        X = self.featurizer_.transform([record])
        logits = (np.asarray(X @ self.weights_.T) + self.bias_)[0]
        z = logits - logits.max()
        exp_z = np.exp(z)
        probs_arr = exp_z / exp_z.sum()
        probs = {lab: float(p) for lab, p in zip(self.label_set_, probs_arr)}
        best = max(probs.values())
        label = min(lab for lab, p in probs.items() if p == best)
        return label, probs

    def predict(self, records) -> list[str]:
        return [self.predict_record(r)[0] for r in records]

    def _check_fitted(self):
        if not hasattr(self, "weights_"):
            raise DatasetError("classifier is not fitted: call fit() or load a model")

    # -- persistence ----------------------------------------------------

    def save(self, path) -> None:
        self._check_fitted()
        vocab = sorted(self.featurizer_.vocabulary_, key=self.featurizer_.vocabulary_.get)
        header = json.dumps(
            {
                "format_version": 1,
                "label_set": list(self.label_set_),
                "trained_on": self.trained_on_,
                "seed": self.seed,
                "best_epoch": self.best_epoch_,
                "n_features": int(self.featurizer_.n_features_),
                "vocabulary": vocab,
                "params": {
                    "learning_rate": self.learning_rate,
                    "l2": self.l2,
                    "max_epochs": self.max_epochs,
                    "patience": self.patience,
                },
            }
        ).encode("utf-8")
        with open(path, "wb") as out:
            out.write(_MODEL_MAGIC)
            out.write(struct.pack("<I", len(header)))
            out.write(header)
            out.write(np.ascontiguousarray(self.featurizer_.idf_, dtype="<f8").tobytes())
            out.write(np.ascontiguousarray(self.weights_, dtype="<f8").tobytes())
            out.write(np.ascontiguousarray(self.bias_, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "VeracityClassifier":
        with open(path, "rb") as handle:
            data = handle.read()
        if data[:8] != _MODEL_MAGIC:
            raise IndexFormatError(f"{path}: bad magic {data[:8]!r}, expected {_MODEL_MAGIC!r}")
        try:
            (header_len,) = struct.unpack_from("<I", data, 8)
            header = json.loads(data[12 : 12 + header_len])
            offset = 12 + header_len
            vocab = header["vocabulary"]
            n_features = int(header["n_features"])
            n_labels = len(header["label_set"])
            n_vocab = len(vocab)
            idf = np.frombuffer(data, dtype="<f8", count=n_vocab, offset=offset).copy()
            offset += n_vocab * 8
            weights = (
                np.frombuffer(data, dtype="<f8", count=n_labels * n_features, offset=offset)
                .reshape(n_labels, n_features)
                .copy()
            )
            offset += n_labels * n_features * 8
            bias = np.frombuffer(data, dtype="<f8", count=n_labels, offset=offset).copy()
            offset += n_labels * 8
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise IndexFormatError(f"{path}: corrupt model file ({exc})") from exc
        if offset != len(data):
            raise IndexFormatError(f"{path}: {len(data) - offset} trailing bytes")
        if n_features != n_vocab + len(LABELS):
            raise IndexFormatError(
                f"{path}: header n_features {n_features} does not match "
                f"vocabulary size {n_vocab} + {len(LABELS)} label slots"
            )
        params = header.get("params", {})
        model = cls(
            learning_rate=params.get("learning_rate", 0.1),
            l2=params.get("l2", 1e-4),
            max_epochs=params.get("max_epochs", 200),
            patience=params.get("patience", 10),
            seed=int(header.get("seed", 42)),
        )
        featurizer = TfidfNgramFeaturizer()
        featurizer.vocabulary_ = {gram: i for i, gram in enumerate(vocab)}
        featurizer.idf_ = idf
        featurizer.n_features_ = n_features
        model.featurizer_ = featurizer
        model.label_set_ = tuple(header["label_set"])
        model.trained_on_ = header.get("trained_on", "")
        model.best_epoch_ = int(header.get("best_epoch", 0))
        model.weights_ = weights
        model.bias_ = bias
        model.history_ = {"train_loss": [], "val_macro_f1": []}
        return model


def train_classifier(train_records, val_records, config: TrainConfig | None = None) -> VeracityClassifier:
    config = config or TrainConfig()
    model = VeracityClassifier(
        learning_rate=config.learning_rate,
        l2=config.l2,
        max_epochs=config.max_epochs,
        patience=config.patience,
        seed=config.seed,
    )
    return model.fit(train_records, val_records)


def predict(model: VeracityClassifier, record: VerdictRecord) -> tuple[str, dict[str, float]]:
    return model.predict_record(record)


def zero_shot_classify(
    record: VerdictRecord,
    provider_mode: str = "llm_passthrough",
    endpoint: str | None = None,
    candidate_labels=LABELS,
    timeout: float = 60.0,
) -> str:
    """Zero-shot label for one record.

    llm_passthrough hands the reasoning label through unchanged (records
    whose reasoning output failed to parse already carry NEI). The
    external mode posts the record to a scoring endpoint and returns its
    top label, ties broken lexicographically.
    """
    if provider_mode == "llm_passthrough":
        return record.llm_label
    if provider_mode != "external_endpoint":
        raise ValueError(f"unknown provider_mode {provider_mode!r}")
    if not endpoint:
        raise ProviderError("external_endpoint mode requires an endpoint")
    try:
        resp = requests.post(
            endpoint,
            json={
                "claim": record.claim,
                "evidence": record.evidence,
                "justification": record.justification,
                "candidate_labels": list(candidate_labels),
            },
            timeout=timeout,
        )
    except requests.RequestException as exc:
        raise ProviderError(f"zero-shot endpoint unreachable: {exc}", retryable=True) from exc
    if resp.status_code != 200:
        raise ProviderError(
            f"zero-shot endpoint returned {resp.status_code}: {resp.text[:200]}",
            status=resp.status_code,
        )
    payload = resp.json()
    labels = payload.get("labels")
    scores = payload.get("scores")
    if not labels or not scores or len(labels) != len(scores):
        raise ProviderError("zero-shot endpoint returned mismatched labels/scores")
    best = max(scores)
    return min(lab for lab, s in zip(labels, scores) if s == best)
