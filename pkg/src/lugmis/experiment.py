"""Declarative experiment suites: load a TOML config, run cross-validation
for every learner and n-gram setting, write tables and prediction dumps."""

from __future__ import annotations

import logging
import os
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classifiers import ModelSpec, SpecError
from .corpus import LabeledDataset, load_dataset
from .evaluate import MetricsReport, cross_validate, render_results_table
from .featurize import NGramConfig
from .preprocess import CleaningConfig, default_stopwords, load_stopwords, prepare_text

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("lugmis")

CLEANING_KEYS = ("lowercase", "strip_mentions", "strip_retweet_markers", "strip_urls", "strip_emails",
                 "strip_symbols", "strip_non_ascii", "remove_stopwords")
NGRAM_NAMES = {1: "unigram", 2: "bigram", 3: "trigram"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Experiment:
    name: str
    spec: ModelSpec
    ngrams: tuple[int, ...] | None = None  # None: every setting in the suite


@dataclass(frozen=True)
class ExperimentConfig:
    experiments: tuple[Experiment, ...]
    dataset: Path | None = None
    stopwords: Path | None = None
    ngrams: tuple[int, ...] = (1,)
    min_doc_frequency: int = 1
    binary_features: bool = True
    folds: int = 10
    seed: int = 0
    out_dir: Path = Path("results")
    whole_corpus_vocab: bool = False
    cleaning: dict = field(default_factory=lambda: {k: k != "remove_stopwords" for k in CLEANING_KEYS})

    def validate(self) -> None:
        if not self.experiments:
            raise ConfigError("no experiments configured")
        names = [e.name for e in self.experiments]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ConfigError(f"duplicate experiment name(s): {', '.join(dupes)}")
        for n in self.ngrams:
            if n not in (1, 2, 3):
                raise ConfigError(f"ngrams must be 1, 2 or 3, got {n}")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.dataset is None:
            raise ConfigError("no dataset given")
        if not Path(self.dataset).is_file():
            raise ConfigError(f"dataset not found: {self.dataset}")
        if self.stopwords is not None and not Path(self.stopwords).is_file():
            raise ConfigError(f"stopword file not found: {self.stopwords}")

    def cleaning_config(self) -> CleaningConfig:
        words = load_stopwords(self.stopwords) if self.stopwords else default_stopwords()
        return CleaningConfig(**self.cleaning, stopword_list=words)

    def ngram_config(self, n: int) -> NGramConfig:
        return NGramConfig(n, self.min_doc_frequency, self.binary_features)


def _experiment(entry: dict, i: int) -> Experiment:
    entry = dict(entry)
    name = entry.pop("name", None)
    if not name:
        raise ConfigError(f"learner entry {i} has no name")
    ngrams = entry.get("ngrams")
    try:
        spec = ModelSpec.from_dict(entry)
    except SpecError as exc:
        raise ConfigError(f"learner {name!r}: {exc}") from None
    return Experiment(name, spec, tuple(ngrams) if ngrams is not None else None)


def config_from_dict(d: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Build a config from parsed TOML; relative paths resolve against ``base_dir``."""
    d = dict(d)
    run = dict(d.pop("run", {}))
    cleaning = dict(d.pop("cleaning", {}))
    learners = d.pop("learner", [])
    if d:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(d))}")
    unknown = sorted(set(cleaning) - set(CLEANING_KEYS))
    if unknown:
        raise ConfigError(f"unknown cleaning switch(es): {', '.join(unknown)}")

    def path(key):
        v = run.pop(key, None)
        if v is None:
            return None
        p = Path(v)
        return p if p.is_absolute() or base_dir is None else base_dir / p

    defaults = ExperimentConfig(experiments=())
    ngrams = run.pop("ngrams", list(defaults.ngrams))
    cfg = ExperimentConfig(
        experiments=tuple(_experiment(e, i) for i, e in enumerate(learners)),
        dataset=path("dataset"),
        stopwords=path("stopwords"),
        ngrams=tuple([ngrams] if isinstance(ngrams, int) else ngrams),
        min_doc_frequency=run.pop("min_doc_frequency", defaults.min_doc_frequency),
        binary_features=run.pop("binary_features", defaults.binary_features),
        folds=run.pop("folds", defaults.folds),
        seed=run.pop("seed", defaults.seed),
        out_dir=Path(run.pop("out_dir", defaults.out_dir)),
        whole_corpus_vocab=run.pop("whole_corpus_vocab", defaults.whole_corpus_vocab),
        cleaning={**defaults.cleaning, **cleaning},
    )
    if run:
        raise ConfigError(f"unknown run key(s): {', '.join(sorted(run))}")
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(data, base_dir=path.parent)


def override(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    """Replace fields whose override value is not None."""
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})


def slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


@dataclass(frozen=True)
class SuiteResult:
    reports: dict  # ngram -> list[MetricsReport]
    failures: list  # (name, ngram, message)

    @property
    def ok(self) -> bool:
        return not self.failures


def clean_texts(ds: LabeledDataset, cleaning: CleaningConfig) -> list[str]:
    return [prepare_text(t, cleaning) for t in ds.texts]


def run_suite(cfg: ExperimentConfig, ds: LabeledDataset | None = None) -> SuiteResult:
    """Cross-validate every experiment; failures are logged and collected,
    and the remaining runs still execute."""
    if ds is None:
        ds = load_dataset(cfg.dataset)
    texts = clean_texts(ds, cfg.cleaning_config())
    out = Path(cfg.out_dir)
    reports: dict[int, list[MetricsReport]] = {}
    failures = []
    for n in cfg.ngrams:
        ngram = cfg.ngram_config(n)
        for exp in cfg.experiments:
            if exp.ngrams is not None and n not in exp.ngrams:
                continue
            log.info("cv %s n=%d folds=%d seed=%d", exp.name, n, cfg.folds, cfg.seed)
            try:
                rep = cross_validate(exp.spec, ds, ngram, cfg.folds, cfg.seed, texts=texts,
                                     whole_corpus_vocab=cfg.whole_corpus_vocab, name=exp.name)
            except Exception as exc:  # keep going; reported below
                log.error("run %s (n=%d) failed: %s", exp.name, n, exc)
                failures.append((exp.name, n, str(exc)))
                continue
            stem = f"{slug(exp.name)}_n{n}"
            write_atomic(out / "predictions" / f"{stem}.csv", rep.predictions.to_csv(ds.label_names))
            write_atomic(out / "reports" / f"{stem}.json", rep.to_json())
            reports.setdefault(n, []).append(rep)
    for n, reps in reports.items():
        tag = NGRAM_NAMES[n]
        write_atomic(out / f"results_{tag}.csv", render_results_table(reps, "csv"))
        write_atomic(out / f"results_{tag}.txt", render_results_table(reps, "text"))
    return SuiteResult(reports, failures)
