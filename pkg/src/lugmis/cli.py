"""Command-line entry point: ``lugmis <subcommand> ...``.

Logs go to stderr. Data goes to files under ``--out-dir`` or to stdout.
Exit status is 0 on success, 1 when some experiment run failed and 2 for
unusable input (missing or empty dataset, invalid config).
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import topics as tp
from .classifiers import ModelSpec, SpecError, train
from .classifiers.serialize import model_from_dict, model_to_dict
from .corpus import (
    DatasetError,
    LabeledDataset,
    compute_stats,
    convert_records,
    dataset_from_records,
    load_dataset,
    read_raw_records,
    save_dataset,
)
from .experiment import (
    CLEANING_KEYS,
    ConfigError,
    Experiment,
    ExperimentConfig,
    clean_texts,
    load_config,
    override,
    run_suite,
    write_atomic,
)
from .evaluate import render_results_table
from .featurize import (
    NGramConfig,
    Vocabulary,
    build_vocabulary,
    sparse_matrix_text,
    vectorize_all,
    write_vocabulary_csv,
)
from .preprocess import CleaningConfig, default_stopwords, load_stopwords

log = logging.getLogger("lugmis")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
BUNDLE_FORMAT = "lugmis.pipeline"


class InputError(Exception):
    pass


def _load(path) -> LabeledDataset:
    if path is None:
        raise InputError("--dataset is required")
    if not Path(path).is_file():
        raise InputError(f"dataset not found: {path}")
    try:
        ds = load_dataset(path)
    except (DatasetError, OSError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(ds) == 0:
        raise InputError(f"{path}: dataset is empty")
    return ds


def _stopwords(path):
    if path is None:
        return default_stopwords()
    if not Path(path).is_file():
        raise InputError(f"stopword file not found: {path}")
    return load_stopwords(path)


def _cleaning(args, remove_stopwords=False) -> CleaningConfig:
    switches = {k: True for k in CLEANING_KEYS}
    switches["remove_stopwords"] = remove_stopwords
    if getattr(args, "keep_non_ascii", False):
        switches["strip_non_ascii"] = False
    return CleaningConfig(**switches, stopword_list=_stopwords(args.stopwords))


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_stats(args) -> int:
    ds = _load(args.dataset)
    stats = compute_stats(ds.filter_source(args.source))
    sys.stdout.write(stats.to_table())
    if args.out_dir:
        write_atomic(_out_dir(args) / "stats.csv", stats.to_csv())
    return EXIT_OK


def cmd_convert(args) -> int:
    if not Path(args.input).is_file():
        raise InputError(f"input not found: {args.input}")
    try:
        records = convert_records(
            read_raw_records(args.input),
            text_field=args.text_field,
            label_field=args.label_field,
            source_field=args.source_field,
            id_field=args.id_field,
            label_map=json.loads(args.label_map) if args.label_map else None,
            default_source=args.default_source,
        )
        ds = dataset_from_records(records)
    except DatasetError as exc:
        raise InputError(str(exc)) from None
    save_dataset(ds, args.output)
    log.info("wrote %d records to %s", len(ds), args.output)
    return EXIT_OK


def cmd_preprocess(args) -> int:
    ds = _load(args.dataset)
    cleaning = _cleaning(args, remove_stopwords=args.remove_stopwords)
    records, dropped = [], 0
    for doc, text in zip(ds, clean_texts(ds, cleaning)):
        if not text:
            dropped += 1
            continue
        records.append({"id": doc.id, "text": text, "label": doc.label.value, "source": doc.source.value})
    if dropped:
        log.warning("dropped %d record(s) whose cleaned text is empty", dropped)
    save_dataset(dataset_from_records(records), args.output)
    return EXIT_OK


def cmd_featurize(args) -> int:
    ds = _load(args.dataset).filter_source(args.source)
    texts = clean_texts(ds, _cleaning(args))
    out = _out_dir(args)
    for n in range(1, args.ngrams + 1):
        vocab = build_vocabulary(texts, NGramConfig(n, args.min_df, not args.counts))
        sys.stdout.write(f"max_n={n}\tfeatures={vocab.size}\n")
    buf = io.StringIO()
    write_vocabulary_csv(vocab, buf)
    write_atomic(out / "vocabulary.csv", buf.getvalue())
    X = vectorize_all(texts, vocab)
    write_atomic(out / "features.txt", sparse_matrix_text(X, [d.label.value for d in ds]))
    return EXIT_OK


def _suite_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig(experiments=())
    learners = []
    for kind in args.learner or []:
        try:
            learners.append(Experiment(kind, ModelSpec(kind)))
        except SpecError as exc:
            raise ConfigError(str(exc)) from None
    cfg = override(
        cfg,
        experiments=tuple(learners) if learners else None,
        dataset=Path(args.dataset) if args.dataset else None,
        stopwords=Path(args.stopwords) if args.stopwords else None,
        ngrams=tuple(range(1, args.ngrams + 1)) if args.ngrams_upto else ((args.ngrams,) if args.ngrams else None),
        folds=args.folds,
        seed=args.seed,
        out_dir=Path(args.out_dir) if args.out_dir else None,
        whole_corpus_vocab=True if args.whole_corpus_vocab else None,
    )
    cfg.validate()
    return cfg


def cmd_cv(args) -> int:
    cfg = _suite_config(args)
    ds = _load(cfg.dataset).filter_source(args.source)
    result = run_suite(cfg, ds)
    for n, reps in result.reports.items():
        sys.stdout.write(f"# max_n={n}\n")
        sys.stdout.write(render_results_table(reps, "text"))
    for name, n, msg in result.failures:
        log.error("FAILED %s (max_n=%d): %s", name, n, msg)
    return EXIT_OK if result.ok else EXIT_FAIL


def cmd_train(args) -> int:
    ds = _load(args.dataset).filter_source(args.source)
    try:
        spec = ModelSpec.from_dict(json.loads(args.spec)) if args.spec else ModelSpec(args.learner)
    except (SpecError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from None
    cleaning = _cleaning(args)
    texts = clean_texts(ds, cleaning)
    vocab = build_vocabulary(texts, NGramConfig(args.ngrams or 1))
    model = train(spec, vectorize_all(texts, vocab), ds.labels(), seed=args.seed, labels=ds.label_names)
    bundle = {
        "format": BUNDLE_FORMAT,
        "version": 1,
        "cleaning": {k: getattr(cleaning, k) for k in CLEANING_KEYS},
        "vocabulary": vocab.to_dict(),
        "model": model_to_dict(model),
    }
    write_atomic(Path(args.output), json.dumps(bundle, allow_nan=False))
    log.info("trained %s on %d documents, %d features", spec.describe(), len(ds), vocab.size)
    return EXIT_OK


def cmd_predict(args) -> int:
    if not Path(args.model).is_file():
        raise InputError(f"model file not found: {args.model}")
    try:
        bundle = json.loads(Path(args.model).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.model}: {exc}") from None
    if not isinstance(bundle, dict) or bundle.get("format") != BUNDLE_FORMAT:
        raise InputError(f"{args.model}: not a trained pipeline file")
    ds = _load(args.dataset)
    cleaning = CleaningConfig(**bundle["cleaning"], stopword_list=_stopwords(args.stopwords))
    vocab = Vocabulary.from_dict(bundle["vocabulary"])
    model = model_from_dict(bundle["model"])
    scores = model.scores(vectorize_all(clean_texts(ds, cleaning), vocab))
    pred = np.argmax(scores, axis=1)
    lines = ["doc_id,predicted_label,positive_score"]
    lines += [f"{d.id},{model.label_names[p]},{s!r}" for d, p, s in zip(ds, pred.tolist(), scores[:, 0].tolist())]
    text = "\n".join(lines) + "\n"
    if args.output:
        write_atomic(Path(args.output), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_topics(args) -> int:
    ds = _load(args.dataset)
    stop = _stopwords(args.stopwords)
    cleaning = _cleaning(args)
    out = _out_dir(args)
    for source in args.source or ["all"]:
        sub = ds.filter_source(source)
        docs = [tp.topic_tokens(t, stop, args.ngrams or 1) for t in clean_texts(sub, cleaning)]
        kept = [d for d in docs if d]
        if len(kept) < len(docs):
            log.warning("%s: skipped %d document(s) with no tokens after stopword removal",
                        source, len(docs) - len(kept))
        if not kept:
            raise InputError(f"{source}: no documents with tokens")
        cfg = tp.LdaConfig(num_topics=args.topics, iterations=args.iterations, seed=args.seed)
        log.info("%s: LDA on %d documents, K=%d, %d sweeps", source, len(kept), cfg.num_topics, cfg.iterations)
        model = tp.train_lda(kept, cfg)
        perp = {
            "source": source,
            "documents": len(kept),
            "num_topics": cfg.num_topics,
            "inference": "collapsed gibbs",
            "training_perplexity": tp.training_perplexity(model, kept),
        }
        rng = np.random.default_rng(args.seed)
        n_held = int(round(args.heldout_fraction * len(kept)))
        if n_held > 0 and len(kept) - n_held > 0:
            order = rng.permutation(len(kept))
            held = [kept[i] for i in sorted(order[:n_held])]
            rest = [kept[i] for i in sorted(order[n_held:])]
            fit = tp.train_lda(rest, cfg)
            try:
                perp["heldout_perplexity"] = tp.perplexity(fit, held, seed=args.seed)
                perp["heldout_documents"] = n_held
            except ValueError as exc:
                log.warning("%s: held-out perplexity unavailable: %s", source, exc)
        write_atomic(out / f"topics_{source}.csv", tp.topics_csv(tp.summarize(model, args.top_words)))
        write_atomic(out / f"frequencies_{source}.csv", tp.frequencies_csv(tp.word_frequencies(kept)))
        write_atomic(out / f"perplexity_{source}.json", json.dumps(perp, indent=2, sort_keys=True) + "\n")
        sys.stdout.write(f"{source}\tdocuments={len(kept)}\ttraining_perplexity={perp['training_perplexity']:.2f}")
        if "heldout_perplexity" in perp:
            sys.stdout.write(f"\theldout_perplexity={perp['heldout_perplexity']:.2f}")
        sys.stdout.write("\n")
    return EXIT_OK


def bundled_config_path() -> Path:
    return Path(str(resources.files("lugmis") / "configs" / "replication.toml"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lugmis", description="Luganda-English misinformation detection toolkit")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=0):
        sp.add_argument("--dataset", help="canonical dataset JSON / NDJSON")
        sp.add_argument("--stopwords", help="stopword file (default: bundled Luganda + English list)")
        sp.add_argument("--seed", type=int, default=seed)

    s = sub.add_parser("stats", help="label counts per source")
    s.add_argument("--dataset")
    s.add_argument("--source", choices=["twitter", "facebook", "all"], default="all")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("convert", help="normalize a raw dataset file into the canonical schema")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--text-field")
    s.add_argument("--label-field")
    s.add_argument("--source-field")
    s.add_argument("--id-field")
    s.add_argument("--label-map", help='JSON object, e.g. \'{"1": "misinformation"}\'')
    s.add_argument("--default-source", choices=["twitter", "facebook"])
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("preprocess", help="write a cleaned copy of a dataset")
    common(s)
    s.add_argument("--output", required=True)
    s.add_argument("--remove-stopwords", action="store_true")
    s.add_argument("--keep-non-ascii", action="store_true")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("featurize", help="vocabulary sizes, vocabulary CSV and sparse feature file")
    common(s)
    s.add_argument("--ngrams", type=int, choices=[1, 2, 3], default=1)
    s.add_argument("--min-df", type=int, default=1)
    s.add_argument("--counts", action="store_true", help="occurrence counts instead of presence")
    s.add_argument("--source", choices=["twitter", "facebook", "all"], default="all")
    s.add_argument("--out-dir", default="features")
    s.set_defaults(func=cmd_featurize)

    s = sub.add_parser("cv", help="cross-validated experiment suite")
    common(s, seed=None)
    s.add_argument("--config", help="TOML experiment file")
    s.add_argument("--replicate", action="store_true", help="use the bundled replication config")
    s.add_argument("--learner", action="append", help="learner kind with default settings (repeatable)")
    s.add_argument("--ngrams", type=int, choices=[1, 2, 3])
    s.add_argument("--ngrams-upto", action="store_true", help="run every setting 1..--ngrams")
    s.add_argument("--folds", type=int)
    s.add_argument("--source", choices=["twitter", "facebook", "all"], default="all")
    s.add_argument("--out-dir")
    s.add_argument("--whole-corpus-vocab", action="store_true")
    s.set_defaults(func=cmd_cv)

    s = sub.add_parser("train", help="fit one learner on a whole dataset and save it")
    common(s)
    s.add_argument("--learner", default="dmnb")
    s.add_argument("--spec", help="learner spec as JSON, overrides --learner")
    s.add_argument("--ngrams", type=int, choices=[1, 2, 3], default=1)
    s.add_argument("--source", choices=["twitter", "facebook", "all"], default="all")
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", help="score a dataset with a saved model")
    s.add_argument("--model", required=True)
    s.add_argument("--dataset")
    s.add_argument("--stopwords")
    s.add_argument("--output")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("topics", help="LDA topics, perplexity and word frequencies")
    common(s)
    s.add_argument("--source", action="append", choices=["twitter", "facebook", "all"])
    s.add_argument("--topics", type=int, default=10)
    s.add_argument("--iterations", type=int, default=1000)
    s.add_argument("--ngrams", type=int, choices=[1, 2, 3], default=1)
    s.add_argument("--top-words", type=int, default=10)
    s.add_argument("--heldout-fraction", type=float, default=0.1)
    s.add_argument("--out-dir", default="topics")
    s.set_defaults(func=cmd_topics)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    if getattr(args, "replicate", False) and not args.config:
        args.config = str(bundled_config_path())
    try:
        return args.func(args)
    except (InputError, ConfigError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
