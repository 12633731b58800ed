"""Command-line surface: one subcommand per pipeline stage or protocol.

Every subcommand is a thin adapter over the library, so CLI runs and
direct library calls produce identical outputs. Exit codes: 0 success,
1 domain error (bad data, failing provider), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__
from .config import RunConfig, resolve_config
from .corpus import build_units, ingest_corpus
from .datasets import ClaimRecord, DatasetSpec, dataset_profile, load_dataset, normalize_label, split_dataset
from .dense_index import (
    DenseIndex,
    MockEmbeddingProvider,
    PrecomputedEmbeddingProvider,
    RemoteEmbeddingProvider,
    build_dense_index,
    load_dense_index,
    save_dense_index,
)
from .errors import CerError, DatasetError
from .evaluation import (
    ablation_run,
    corpus_stats,
    cross_eval,
    format_ablation,
    format_cross_eval,
    run_baseline,
    write_stats_csv,
)
from .evidence import RETRIEVAL_MODES
from .pipeline import (
    evaluate_records,
    read_evidence_file,
    reason_over_evidence,
    retrieve_for_claims,
    write_evidence_file,
)
from .reasoning import (
    VARIANTS,
    CannedLLMProvider,
    FixtureLLMProvider,
    HTTPLLMProvider,
    ResponseCache,
)
from .sparse_index import build_sparse_index, load_sparse_index, save_sparse_index
from .veracity import (
    TrainConfig,
    VeracityClassifier,
    read_interchange,
    train_classifier,
    write_interchange,
    zero_shot_classify,
)


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except CerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cer",
        description="Evidence-grounded claim verification pipeline",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    # index
    p_index = sub.add_parser("index", help="build or inspect retrieval indexes")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)
    p_build = index_sub.add_parser("build", help="index a corpus for retrieval")
    p_build.add_argument("--corpus", required=True, help="documents file (jsonl or tsv)")
    p_build.add_argument("--corpus-format", choices=("jsonl", "tsv"), default="jsonl")
    p_build.add_argument("--mode", choices=RETRIEVAL_MODES, required=True)
    p_build.add_argument("--out", required=True, help="index file to write")
    p_build.add_argument("--k1", type=float, default=None, help="BM25 k1 (default 1.2)")
    p_build.add_argument("--b", type=float, default=None, help="BM25 b (default 0.75)")
    _add_embed_flags(p_build)
    _add_config_flag(p_build)
    p_build.set_defaults(handler=cmd_index_build)

    # retrieve
    p_ret = sub.add_parser("retrieve", help="rank evidence sentences for claims")
    p_ret.add_argument("--index", required=True, help="index file from `index build`")
    p_ret.add_argument("--mode", choices=RETRIEVAL_MODES, default=None,
                       help="defaults to the index file's own kind")
    group = p_ret.add_mutually_exclusive_group(required=True)
    group.add_argument("--claim", help="one claim text")
    group.add_argument("--claims", help="claims file (jsonl or tsv)")
    p_ret.add_argument("--claims-format", choices=("jsonl", "tsv"), default=None)
    p_ret.add_argument("--dataset", default="", help="dataset tag for batch claims")
    p_ret.add_argument("-k", type=int, default=None, help="hits per claim (default 20)")
    p_ret.add_argument("--out", help="evidence JSONL to write (required with --claims)")
    _add_embed_flags(p_ret)
    _add_config_flag(p_ret)
    p_ret.set_defaults(handler=cmd_retrieve)

    # reason
    p_reason = sub.add_parser("reason", help="generate labeled justifications")
    p_reason.add_argument("--pairs", required=True, help="evidence JSONL from `retrieve`")
    p_reason.add_argument("--out", required=True, help="interchange JSONL to write")
    p_reason.add_argument("--variant", choices=VARIANTS, default=None)
    p_reason.add_argument("--m", type=int, default=None,
                          help="evidence sentences kept on each record (default 3)")
    _add_llm_flags(p_reason)
    _add_config_flag(p_reason)
    p_reason.set_defaults(handler=cmd_reason)

    # classify
    p_cls = sub.add_parser("classify", help="assign final veracity labels")
    p_cls.add_argument("--in", dest="infile", required=True, help="interchange JSONL")
    p_cls.add_argument("--mode", choices=("zero-shot", "trained"), required=True)
    p_cls.add_argument("--model", help="model file (trained mode)")
    p_cls.add_argument("--zs-endpoint", help="external zero-shot scoring endpoint")
    p_cls.add_argument("--out", required=True, help="interchange JSONL to write")
    p_cls.set_defaults(handler=cmd_classify)

    # train
    p_train = sub.add_parser("train", help="train the veracity classifier")
    p_train.add_argument("--train", dest="train_file", required=True, help="interchange JSONL")
    p_train.add_argument("--val", dest="val_file", required=True, help="interchange JSONL")
    p_train.add_argument("--out-model", required=True, help="model file to write")
    p_train.add_argument("--learning-rate", type=float, default=None)
    p_train.add_argument("--l2", type=float, default=None)
    p_train.add_argument("--max-epochs", type=int, default=None)
    p_train.add_argument("--patience", type=int, default=None)
    p_train.add_argument("--seed", type=int, default=None)
    _add_config_flag(p_train)
    p_train.set_defaults(handler=cmd_train)

    # eval
    p_eval = sub.add_parser("eval", help="score predictions against gold labels")
    p_eval.add_argument("--pred", required=True, help="interchange JSONL with predicted_label")
    p_eval.add_argument("--gold", help="claims file with gold labels (else gold_label in --pred)")
    p_eval.add_argument("--gold-format", choices=("jsonl", "tsv"), default=None)
    p_eval.add_argument("--dataset", help="profile name fixing the label set")
    p_eval.add_argument("--json", action="store_true", help="emit the report as JSON")
    p_eval.add_argument("--out", help="also write the report (JSON) here")
    p_eval.set_defaults(handler=cmd_eval)

    # baseline
    p_base = sub.add_parser("baseline", help="constant-predictor reference scores")
    p_base.add_argument("--dataset", required=True)
    p_base.add_argument("--which", required=True,
                        choices=("all_supported", "all_refuted", "all_nei"))
    p_base.add_argument("--data", help="claims file; omit to use published label counts")
    p_base.add_argument("--data-format", choices=("jsonl", "tsv"), default=None)
    p_base.add_argument("--strict-counts", action="store_true")
    p_base.add_argument("--json", action="store_true")
    p_base.set_defaults(handler=cmd_baseline)

    # ablate
    p_abl = sub.add_parser("ablate", help="compare prompt variants end to end")
    p_abl.add_argument("--dataset", required=True)
    p_abl.add_argument("--claims", required=True, help="claims file with gold labels")
    p_abl.add_argument("--claims-format", choices=("jsonl", "tsv"), default=None)
    p_abl.add_argument("--index", required=True, help="index file")
    p_abl.add_argument("--mode", choices=RETRIEVAL_MODES, default=None)
    p_abl.add_argument("--variants", default=",".join(VARIANTS),
                       help="comma-separated prompt variants (default: all)")
    p_abl.add_argument("--out", help="also write the table as JSON here")
    _add_embed_flags(p_abl)
    _add_llm_flags(p_abl)
    _add_config_flag(p_abl)
    p_abl.set_defaults(handler=cmd_ablate)

    # cross-eval
    p_cross = sub.add_parser("cross-eval", help="train/test matrix across datasets")
    p_cross.add_argument("--train", required=True, help="comma-separated dataset names")
    p_cross.add_argument("--test", required=True, help="comma-separated dataset names")
    p_cross.add_argument("--data", action="append", required=True, metavar="NAME=FILE",
                         help="interchange JSONL with split fields; repeatable")
    p_cross.add_argument("--json", action="store_true")
    p_cross.add_argument("--out", help="also write the matrix as JSON here")
    p_cross.add_argument("--learning-rate", type=float, default=None)
    p_cross.add_argument("--l2", type=float, default=None)
    p_cross.add_argument("--max-epochs", type=int, default=None)
    p_cross.add_argument("--patience", type=int, default=None)
    p_cross.add_argument("--seed", type=int, default=None)
    _add_config_flag(p_cross)
    p_cross.set_defaults(handler=cmd_cross_eval)

    # stats
    p_stats = sub.add_parser("stats", help="per-document mean sentence length histogram")
    p_stats.add_argument("--corpus", required=True)
    p_stats.add_argument("--corpus-format", choices=("jsonl", "tsv"), default="jsonl")
    p_stats.add_argument("--out", required=True, help="CSV file to write")
    p_stats.add_argument("--bins", type=int, default=50)
    p_stats.set_defaults(handler=cmd_stats)

    # split
    p_split = sub.add_parser("split", help="write stratified train/validation/test claim files")
    p_split.add_argument("--dataset", required=True)
    p_split.add_argument("--data", required=True, help="claims file")
    p_split.add_argument("--data-format", choices=("jsonl", "tsv"), default=None)
    p_split.add_argument("--out-dir", required=True)
    p_split.add_argument("--seed", type=int, default=42)
    p_split.add_argument("--strict-counts", action="store_true")
    p_split.set_defaults(handler=cmd_split)

    return parser


def _add_config_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="config file (JSON or key=value lines)")


def _add_embed_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--embed-provider", choices=("mock", "precomputed", "remote"),
                   default="mock", help="embedding source for dense mode")
    p.add_argument("--dim", type=int, default=32, help="mock embedding dimension")
    p.add_argument("--vectors", help="precomputed vectors file")
    p.add_argument("--embed-endpoint", help="remote embedding endpoint URL")
    p.add_argument("--embed-tag", help="provider tag for the remote embedder")


def _add_llm_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--provider", choices=("canned", "fixtures", "http"), default="canned",
                   help="LLM backend (canned = offline deterministic)")
    p.add_argument("--fixtures", help="fixtures JSON file (prompt hash -> response)")
    p.add_argument("--endpoint", help="LLM endpoint URL (http provider)")
    p.add_argument("--api-key", help="LLM API key (http provider)")
    p.add_argument("--provider-tag", help="cache/identity tag for the http provider")
    p.add_argument("--cache-dir", help="response cache directory")
    p.add_argument("--char-budget", type=int, default=None)
    p.add_argument("--max-in-flight", type=int, default=None)


def _config(args, **overrides) -> RunConfig:
    values = dict(overrides)
    return resolve_config(values, config_path=getattr(args, "config", None))


def _embed_provider(args, cfg: RunConfig):
    if args.embed_provider == "mock":
        return MockEmbeddingProvider(dimension=args.dim)
    if args.embed_provider == "precomputed":
        if not args.vectors:
            raise DatasetError("--embed-provider precomputed requires --vectors")
        return PrecomputedEmbeddingProvider(args.vectors)
    return RemoteEmbeddingProvider(
        endpoint=args.embed_endpoint or cfg.embed_endpoint,
        tag=args.embed_tag or "remote",
    )


def _llm_provider(args, cfg: RunConfig):
    if args.provider == "canned":
        return CannedLLMProvider()
    if args.provider == "fixtures":
        if not args.fixtures:
            raise DatasetError("--provider fixtures requires --fixtures FILE")
        return FixtureLLMProvider(args.fixtures)
    endpoint = args.endpoint or cfg.llm_endpoint
    return HTTPLLMProvider(
        endpoint=endpoint,
        api_key=args.api_key or cfg.llm_api_key,
        tag=args.provider_tag,
    )


def _cache(args, cfg: RunConfig) -> ResponseCache | None:
    cache_dir = getattr(args, "cache_dir", None) or cfg.cache_dir
    return ResponseCache(cache_dir) if cache_dir else None


def _read_claims(path, dataset: str, fmt: str | None) -> list[ClaimRecord]:
    """Claims file reader for pipeline inputs: labels and splits optional."""
    if fmt is None:
        fmt = "tsv" if str(path).endswith(".tsv") else "jsonl"
    records = []
    seen = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            ref = f"{path} line {line_no}"
            if fmt == "tsv":
                cells = line.rstrip("\n").split("\t")
                if len(cells) < 2:
                    raise DatasetError(f"{ref}: expected at least id<TAB>claim")
                claim_id, claim = cells[0], cells[1]
                label = cells[2] if len(cells) > 2 and cells[2] else None
                split = None
            else:
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DatasetError(f"{ref}: invalid JSON ({exc.msg})") from exc
                claim_id = str(row.get("id", row.get("claim_id", "")))
                claim = row.get("claim", row.get("text", row.get("statement")))
                label = row.get("label", row.get("gold_label", row.get("verdict")))
                split = row.get("split")
            if not claim_id:
                raise DatasetError(f"{ref}: missing claim id")
            if claim_id in seen:
                raise DatasetError(f"{ref}: duplicate claim id {claim_id!r}")
            seen.add(claim_id)
            if not isinstance(claim, str) or not claim:
                raise DatasetError(f"{ref}: missing claim text")
            gold = normalize_label(label, ref) if label is not None else None
            if split is not None and split not in ("train", "validation", "test"):
                raise DatasetError(f"{ref}: unknown split {split!r}")
            records.append(ClaimRecord(claim_id, claim, gold, dataset, split))
    return records


def _load_index(path, mode: str | None):
    """Open an index file, sniffing sparse vs dense when mode is unset."""
    with open(path, "rb") as handle:
        magic = handle.read(8)
    sniffed = {b"CERSIDX1": "sparse", b"CERDIDX1": "dense"}.get(magic)
    if mode is None:
        mode = sniffed
    if mode is None:
        raise DatasetError(f"{path}: not a recognized index file")
    if sniffed is not None and mode != sniffed:
        raise DatasetError(f"{path}: is a {sniffed} index, but --mode {mode} was given")
    if mode == "sparse":
        return "sparse", load_sparse_index(path), None
    return "dense", None, load_dense_index(path)


# -- handlers -----------------------------------------------------------


def cmd_index_build(args, parser) -> int:
    cfg = _config(args, k1=args.k1, b=args.b)
    ingested = ingest_corpus(args.corpus, fmt=args.corpus_format)
    units = build_units(ingested.records)
    if args.mode == "sparse":
        index = build_sparse_index(units, k1=cfg.k1, b=cfg.b)
        save_sparse_index(index, args.out)
        print(
            f"sparse index: {index.size} units, {len(index.postings)} terms, "
            f"avgdl {index.avgdl:.2f} -> {args.out}"
        )
    else:
        provider = _embed_provider(args, cfg)
        index = build_dense_index(units, provider)
        save_dense_index(index, args.out)
        print(
            f"dense index: {index.size} units, dimension {index.dimension}, "
            f"provider {index.provider_tag} -> {args.out}"
        )
    if ingested.skipped:
        print(f"note: skipped {ingested.skipped} malformed corpus row(s)", file=sys.stderr)
    return 0


def cmd_retrieve(args, parser) -> int:
    cfg = _config(args, k=args.k)
    mode, sparse, dense = _load_index(args.index, args.mode)
    provider = _embed_provider(args, cfg) if mode == "dense" else None
    if args.claims and not args.out:
        parser.error("--claims needs --out FILE for the evidence JSONL")
    if args.claim:
        claims = [ClaimRecord("query-0", args.claim, None, args.dataset or "", None)]
    else:
        claims = _read_claims(args.claims, args.dataset, args.claims_format)
    entries = retrieve_for_claims(
        claims, mode=mode, k=cfg.k,
        sparse_index=sparse, dense_index=dense, dense_provider=provider,
    )
    if args.out:
        write_evidence_file(entries, args.out)
        print(f"wrote evidence for {len(entries)} claim(s) -> {args.out}")
    if args.claim:
        for hit in entries[0].evidence.hits:
            print(f"{hit.rank:>3}  {hit.score:>10.4f}  {hit.sentence_id}  {hit.text}")
        if not entries[0].evidence.hits:
            print("no matching sentences")
    return 0


def cmd_reason(args, parser) -> int:
    cfg = _config(
        args,
        prompt_variant=args.variant,
        m=args.m,
        cache_dir=getattr(args, "cache_dir", None),
        char_budget=args.char_budget,
        max_in_flight=args.max_in_flight,
    )
    provider = _llm_provider(args, cfg)
    entries = read_evidence_file(args.pairs)
    records = reason_over_evidence(
        entries,
        provider,
        cache=_cache(args, cfg),
        variant=cfg.prompt_variant,
        m=cfg.m,
        char_budget=cfg.char_budget,
        max_in_flight=cfg.max_in_flight,
    )
    write_interchange(records, args.out)
    parsed = sum(1 for r in records if "parse_failed" not in r.flags)
    print(f"reasoned over {len(records)} claim(s) ({parsed} parsed) -> {args.out}")
    return 0


def cmd_classify(args, parser) -> int:
    records = read_interchange(args.infile)
    if args.mode == "trained":
        if not args.model:
            parser.error("--mode trained requires --model FILE")
        model = VeracityClassifier.load(args.model)
        out = []
        for record in records:
            label, probs = model.predict_record(record)
            out.append(replace(record, predicted_label=label, probabilities=probs,
                               flags=set(record.flags)))
    else:
        mode = "external_endpoint" if args.zs_endpoint else "llm_passthrough"
        out = [
            replace(record,
                    predicted_label=zero_shot_classify(record, mode, endpoint=args.zs_endpoint),
                    flags=set(record.flags))
            for record in records
        ]
    write_interchange(out, args.out)
    print(f"classified {len(out)} record(s) -> {args.out}")
    return 0


def cmd_train(args, parser) -> int:
    cfg = _config(
        args,
        learning_rate=args.learning_rate,
        l2=args.l2,
        max_epochs=args.max_epochs,
        patience=args.patience,
        seed=args.seed,
    )
    train_records = read_interchange(args.train_file)
    val_records = read_interchange(args.val_file)
    model = train_classifier(
        train_records,
        val_records,
        TrainConfig(
            learning_rate=cfg.learning_rate,
            l2=cfg.l2,
            max_epochs=cfg.max_epochs,
            patience=cfg.patience,
            seed=cfg.seed,
        ),
    )
    model.save(args.out_model)
    best_f1 = max(model.history_["val_macro_f1"], default=float("nan"))
    print(
        f"trained on {len(train_records)} records, labels {model.label_set_}, "
        f"best epoch {model.best_epoch_} (val macro-F1 {best_f1:.4f}) -> {args.out_model}"
    )
    return 0


def cmd_eval(args, parser) -> int:
    records = read_interchange(args.pred)
    if args.gold:
        gold_claims = _read_claims(args.gold, args.dataset or "", args.gold_format)
        gold_map = {}
        for claim in gold_claims:
            if claim.gold_label is None:
                raise DatasetError(f"gold file row {claim.claim_id!r} has no label")
            gold_map[claim.claim_id] = claim.gold_label
        merged = []
        for record in records:
            if record.claim_id not in gold_map:
                raise DatasetError(f"no gold label for claim {record.claim_id!r}")
            merged.append(replace(record, gold_label=gold_map[record.claim_id],
                                  flags=set(record.flags)))
        records = merged
    label_set = None
    if args.dataset:
        profile = dataset_profile(args.dataset)
        if profile is None:
            raise DatasetError(f"unknown dataset profile {args.dataset!r}")
        label_set = tuple(profile["label_set"])
    report = evaluate_records(records, label_set=label_set)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as out:
            out.write(report.to_json())
            out.write("\n")
    print(report.to_json() if args.json else report.format_table())
    return 0


def cmd_baseline(args, parser) -> int:
    if args.data:
        ds = load_dataset(args.dataset, args.data, fmt=args.data_format,
                          strict_counts=args.strict_counts)
    else:
        profile = dataset_profile(args.dataset)
        if profile is None or not profile.get("expected_counts"):
            raise DatasetError(
                f"no published counts for {args.dataset!r}; pass --data FILE"
            )
        records = []
        for label in profile["label_set"]:
            for i in range(profile["expected_counts"].get(label, 0)):
                records.append(ClaimRecord(f"{label}-{i}", "", label, profile["name"], None))
        ds = DatasetSpec(
            name=profile["name"],
            label_set=tuple(profile["label_set"]),
            records=records,
            expected_counts=dict(profile["expected_counts"]),
        )
    report = run_baseline(ds, args.which)
    print(report.to_json() if args.json else report.format_table())
    return 0


def cmd_ablate(args, parser) -> int:
    cfg = _config(
        args,
        cache_dir=getattr(args, "cache_dir", None),
        char_budget=args.char_budget,
        max_in_flight=args.max_in_flight,
    )
    ds = load_dataset(args.dataset, args.claims, fmt=args.claims_format)
    mode, sparse, dense = _load_index(args.index, args.mode)
    embed = _embed_provider(args, cfg) if mode == "dense" else None
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for variant in variants:
        if variant not in VARIANTS:
            parser.error(f"unknown prompt variant {variant!r} (choose from {', '.join(VARIANTS)})")
    rows = ablation_run(
        ds.records,
        variants,
        _llm_provider(args, cfg),
        mode=mode,
        k=cfg.k,
        m=cfg.m,
        sparse_index=sparse,
        dense_index=dense,
        dense_provider=embed,
        cache=_cache(args, cfg),
        char_budget=cfg.char_budget,
        max_in_flight=cfg.max_in_flight,
        label_set=ds.label_set,
    )
    if args.out:
        payload = {variant: report.to_dict() for variant, report in rows}
        with open(args.out, "w", encoding="utf-8") as out:
            json.dump(payload, out, indent=2, sort_keys=True)
            out.write("\n")
    print(format_ablation(rows))
    return 0


def cmd_cross_eval(args, parser) -> int:
    cfg = _config(
        args,
        learning_rate=args.learning_rate,
        l2=args.l2,
        max_epochs=args.max_epochs,
        patience=args.patience,
        seed=args.seed,
    )
    data = {}
    for item in args.data:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            parser.error(f"--data expects NAME=FILE, got {item!r}")
        data[name] = read_interchange(path)
    train_names = [n.strip() for n in args.train.split(",") if n.strip()]
    test_names = [n.strip() for n in args.test.split(",") if n.strip()]
    matrix = cross_eval(
        train_names,
        test_names,
        data,
        TrainConfig(
            learning_rate=cfg.learning_rate,
            l2=cfg.l2,
            max_epochs=cfg.max_epochs,
            patience=cfg.patience,
            seed=cfg.seed,
        ),
    )
    if args.out or args.json:
        payload = {
            tname: {sname: report.to_dict() for sname, report in row.items()}
            for tname, row in matrix.items()
        }
        if args.out:
            with open(args.out, "w", encoding="utf-8") as out:
                json.dump(payload, out, indent=2, sort_keys=True)
                out.write("\n")
        if args.json:
            print(json.dumps(payload, indent=2, sort_keys=True))
            return 0
    print(format_cross_eval(matrix))
    return 0


def cmd_stats(args, parser) -> int:
    ingested = ingest_corpus(args.corpus, fmt=args.corpus_format)
    rows = corpus_stats(ingested.records, bins=args.bins)
    write_stats_csv(rows, args.out)
    total = sum(count for _, _, count in rows)
    print(f"histogram over {total} document(s), {len(rows)} bins -> {args.out}")
    return 0


def cmd_split(args, parser) -> int:
    import os

    ds = load_dataset(args.dataset, args.data, fmt=args.data_format,
                      strict_counts=args.strict_counts)
    train, val, test = split_dataset(ds, seed=args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    for split_name, records in (("train", train), ("validation", val), ("test", test)):
        path = os.path.join(args.out_dir, f"{split_name}.jsonl")
        with open(path, "w", encoding="utf-8") as out:
            for record in records:
                out.write(json.dumps(
                    {
                        "id": record.claim_id,
                        "claim": record.claim,
                        "label": record.gold_label,
                        "split": record.split,
                    },
                    ensure_ascii=False,
                ))
                out.write("\n")
        print(f"{split_name}: {len(records)} records -> {path}")
    return 0
