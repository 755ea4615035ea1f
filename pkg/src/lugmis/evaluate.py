"""Stratified cross-validation and the metrics reported for each run."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classifiers import ModelSpec, train
from .corpus import LabeledDataset
from .featurize import NGramConfig, build_vocabulary, vectorize_all

POSITIVE = 0


class FoldError(RuntimeError):
    """A learner failed inside one cross-validation fold."""

    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"fold {fold}: {type(cause).__name__}: {cause}")
        self.fold = fold


@dataclass(frozen=True)
class FoldAssignment:
    folds: np.ndarray
    k: int
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds != fold)

    def counts(self, labels) -> np.ndarray:
        """(k, 2) table of label counts per fold."""
        out = np.zeros((self.k, 2), dtype=np.int64)
        np.add.at(out, (self.folds, np.asarray(labels)), 1)
        return out


def stratified_kfold(labels, k: int, seed: int = 0) -> FoldAssignment:
    """Shuffle each label's instances, then deal them round-robin to folds.

    Label 0's shuffled instances come first and label 1's continue the deal
    where label 0 stopped, so fold sizes also differ by at most one.
    """
    y = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = np.random.default_rng(seed)
    order = []
    for label in (0, 1):
        idx = np.flatnonzero(y == label)
        if idx.size < k:
            raise ValueError(f"label {label} has {idx.size} instances, fewer than k={k}")
        order.append(rng.permutation(idx))
    order = np.concatenate(order)
    folds = np.empty(y.size, dtype=np.int64)
    folds[order] = np.arange(order.size) % k
    return FoldAssignment(folds, int(k), int(seed))


def auroc(scores, labels, positive: int = POSITIVE) -> float:
    """Percentage of (positive, negative) pairs ranked correctly, ties 1/2."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    pos = s[y == positive]
    neg = np.sort(s[y != positive])
    if pos.size == 0 or neg.size == 0:
        raise ValueError("auroc needs both labels present")
    below = np.searchsorted(neg, pos, side="left")
    upto = np.searchsorted(neg, pos, side="right")
    # twice the Mann-Whitney U, kept integral until the final division
    u2 = int(np.sum(2 * below + (upto - below)))
    return 100.0 * u2 / (2 * pos.size * neg.size)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray  # rows: true label, columns: predicted label

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    __hash__ = None

    @classmethod
    def from_predictions(cls, y_true, y_pred) -> "ConfusionMatrix":
        m = np.zeros((2, 2), dtype=np.int64)
        np.add.at(m, (np.asarray(y_true), np.asarray(y_pred)), 1)
        return cls(m)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def per_label(self) -> list[tuple[float, float, float]]:
        """(precision, recall, F) per label, as fractions."""
        out = []
        for c in range(2):
            tp = self.counts[c, c]
            predicted = self.counts[:, c].sum()
            actual = self.counts[c, :].sum()
            p = tp / predicted if predicted else 0.0
            r = tp / actual if actual else 0.0
            f = 2 * p * r / (p + r) if p + r > 0 else 0.0
            out.append((float(p), float(r), float(f)))
        return out


def weighted_f_measure(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    support = cm.counts.sum(axis=1)
    f = np.array([plr[2] for plr in cm.per_label()])
    return 100.0 * float(f @ support) / cm.total


def accuracy(cm: ConfusionMatrix) -> float:
    return 100.0 * float(np.trace(cm.counts)) / cm.total


@dataclass(frozen=True)
class PooledPredictions:
    doc_ids: tuple
    folds: np.ndarray
    y_true: np.ndarray
    y_pred: np.ndarray
    positive_score: np.ndarray

    def to_csv(self, label_names) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["doc_id", "fold", "true_label", "predicted_label", "positive_score"])
        for row in zip(self.doc_ids, self.folds.tolist(), self.y_true.tolist(), self.y_pred.tolist(),
                       self.positive_score.tolist()):
            w.writerow([row[0], row[1], label_names[row[2]], label_names[row[3]], repr(row[4])])
        return buf.getvalue()


@dataclass(frozen=True)
class MetricsReport:
    name: str
    accuracy: float
    auroc: float
    f_measure: float
    per_label: tuple
    confusion: ConfusionMatrix
    spec: ModelSpec
    k: int
    seed: int
    ngram: NGramConfig = field(default_factory=NGramConfig)
    label_names: tuple = ("misinformation", "no-misinformation")
    predictions: PooledPredictions | None = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "accuracy": self.accuracy,
            "auroc": self.auroc,
            "f_measure": self.f_measure,
            "per_label": {
                name: {"precision": 100 * p, "recall": 100 * r, "f": 100 * f}
                for name, (p, r, f) in zip(self.label_names, self.per_label)
            },
            "confusion": self.confusion.counts.tolist(),
            "spec": self.spec.to_dict(),
            "folds": self.k,
            "seed": self.seed,
            "ngram": {"max_n": self.ngram.max_n, "min_doc_frequency": self.ngram.min_doc_frequency,
                      "binary_features": self.ngram.binary_features},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def metrics_from_predictions(name, y_true, y_pred, positive_score, spec, k, seed, ngram=None,
                             label_names=("misinformation", "no-misinformation"), predictions=None):
    cm = ConfusionMatrix.from_predictions(y_true, y_pred)
    return MetricsReport(
        name=name,
        accuracy=accuracy(cm),
        auroc=auroc(positive_score, y_true),
        f_measure=weighted_f_measure(cm),
        per_label=tuple(cm.per_label()),
        confusion=cm,
        spec=spec,
        k=k,
        seed=seed,
        ngram=ngram or NGramConfig(),
        label_names=tuple(label_names),
        predictions=predictions,
    )


def fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(fold)]).generate_state(1, dtype=np.uint32)[0])


def cross_validate(spec: ModelSpec, ds: LabeledDataset, ngram: NGramConfig | None = None, k: int = 10,
                   seed: int = 0, texts: Sequence[str] | None = None, whole_corpus_vocab: bool = False,
                   name: str | None = None) -> MetricsReport:
    """Stratified k-fold CV with metrics computed once on the pooled folds.

    ``texts`` replaces the documents' own text (pass cleaned text here).
    Each fold builds its vocabulary from its training part alone unless
    ``whole_corpus_vocab`` is set. The learner in fold ``i`` is seeded from
    ``(seed, i)``.
    """
    ngram = ngram or NGramConfig()
    texts = list(ds.texts if texts is None else texts)
    if len(texts) != len(ds):
        raise ValueError("texts must align with the dataset documents")
    y = ds.labels()
    assignment = stratified_kfold(y, k, seed)
    n = len(ds)
    pred = np.empty(n, dtype=np.int64)
    score = np.empty(n)
    shared = build_vocabulary(texts, ngram) if whole_corpus_vocab else None
    for fold in range(k):
        tr = assignment.train_indices(fold)
        te = assignment.test_indices(fold)
        try:
            vocab = shared if shared is not None else build_vocabulary([texts[i] for i in tr], ngram)
            X_tr = vectorize_all([texts[i] for i in tr], vocab)
            X_te = vectorize_all([texts[i] for i in te], vocab)
            model = train(spec, X_tr, y[tr], seed=fold_seed(seed, fold), labels=ds.label_names)
            s = model.scores(X_te)
        except Exception as exc:
            raise FoldError(fold, exc) from exc
        pred[te] = np.argmax(s, axis=1)
        score[te] = s[:, POSITIVE]
    pooled = PooledPredictions(tuple(ds.ids), assignment.folds, y, pred, score)
    return metrics_from_predictions(name or spec.kind, y, pred, score, spec, k, seed, ngram,
                                    ds.label_names, pooled)


HEADER = ("Classifier", "Accuracy", "AUROC", "F-Measure")


def render_results_table(reports: Sequence[MetricsReport], fmt: str = "text") -> str:
    """Results table in ``"csv"`` or aligned ``"text"``, two decimals."""
    if not reports:
        raise ValueError("no reports to render")
    rows = [(r.name, f"{r.accuracy:.2f}", f"{r.auroc:.2f}", f"{r.f_measure:.2f}") for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows)
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown table format {fmt!r}")
    widths = [max(len(row[i]) for row in [HEADER, *rows]) for i in range(4)]
    lines = []
    for row in [HEADER, *rows]:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells))
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
