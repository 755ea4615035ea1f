import csv
import io
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lugmis.classifiers import ModelSpec
from lugmis.evaluate import (
    ConfusionMatrix,
    FoldError,
    accuracy,
    auroc,
    cross_validate,
    render_results_table,
    stratified_kfold,
    weighted_f_measure,
)
from lugmis.featurize import NGramConfig


def test_fold_counts_for_table_sized_corpus():
    y = np.array([0] * 613 + [1] * 432)
    c = stratified_kfold(y, 10, seed=0).counts(y)
    assert set(c[:, 0]) <= {61, 62} and set(c[:, 1]) <= {43, 44}
    assert c.sum() == 1045


def test_one_of_each_label_per_fold():
    y = np.array([0, 1] * 5)
    assert np.all(stratified_kfold(y, 5, seed=3).counts(y) == 1)


def test_folds_deterministic_and_seeded():
    y = np.array([0] * 30 + [1] * 20)
    a, b, c = (stratified_kfold(y, 5, s).folds for s in (1, 1, 2))
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_fold_errors():
    with pytest.raises(ValueError, match="fewer than k"):
        stratified_kfold([0] * 10 + [1] * 3, 5)
    with pytest.raises(ValueError):
        stratified_kfold([0, 1] * 5, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.integers(0, 40), st.integers(0, 40), st.integers(0, 99))
def test_stratification_invariant(k, extra0, extra1, seed):
    y = np.array([0] * (k + extra0) + [1] * (k + extra1))
    fa = stratified_kfold(y, k, seed)
    c = fa.counts(y)
    assert np.all(c.max(axis=0) - c.min(axis=0) <= 1)
    sizes = c.sum(axis=1)
    assert sizes.max() - sizes.min() <= 1
    # every instance appears in exactly one test fold
    assert sorted(np.concatenate([fa.test_indices(f) for f in range(k)]).tolist()) == list(range(y.size))


def test_auroc_examples():
    assert auroc([0.9, 0.4, 0.6, 0.1], [0, 0, 1, 1]) == 75.0
    assert auroc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 100.0
    assert auroc([0.5] * 6, [0, 1, 0, 1, 0, 1]) == 50.0
    with pytest.raises(ValueError):
        auroc([0.1, 0.2], [0, 0])


def _brute_auroc(s, y):
    pos = [a for a, l in zip(s, y) if l == 0]
    neg = [a for a, l in zip(s, y) if l == 1]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in itertools.product(pos, neg))
    return 100.0 * wins / (len(pos) * len(neg))


def test_auroc_against_pair_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(2, 30))
        y = rng.integers(0, 2, n)
        y[:2] = [0, 1]
        s = rng.integers(0, 5, n) / 4  # coarse scores force ties
        assert auroc(s, y) == pytest.approx(_brute_auroc(s, y), abs=1e-12)


def test_auroc_label_swap_symmetry():
    rng = np.random.default_rng(1)
    s = rng.random(40)
    y = rng.integers(0, 2, 40)
    assert auroc(s, y) == pytest.approx(auroc(1 - s, 1 - y))


def test_weighted_f_examples():
    assert weighted_f_measure(ConfusionMatrix(np.array([[50, 0], [50, 0]]))) == pytest.approx(100 / 3)
    assert weighted_f_measure(ConfusionMatrix(np.array([[25, 25], [25, 25]]))) == pytest.approx(50.0)
    assert weighted_f_measure(ConfusionMatrix(np.array([[7, 0], [0, 3]]))) == pytest.approx(100.0)
    assert accuracy(ConfusionMatrix(np.array([[7, 1], [2, 3]]))) == pytest.approx(1000 / 13)


def test_confusion_from_predictions():
    cm = ConfusionMatrix.from_predictions([0, 0, 1, 1, 1], [0, 1, 1, 1, 0])
    assert cm.counts.tolist() == [[1, 1], [1, 2]]
    assert cm.total == 5


def test_cross_validate_separable(sep_ds):
    rep = cross_validate(ModelSpec("mnb"), sep_ds, NGramConfig(1), k=5, seed=0)
    assert rep.accuracy == 100.0 and rep.auroc == 100.0 and rep.f_measure == 100.0


def test_cross_validate_deterministic_and_consistent(syn_ds):
    spec = ModelSpec("dmnb")
    a = cross_validate(spec, syn_ds, NGramConfig(1), k=5, seed=4)
    b = cross_validate(spec, syn_ds, NGramConfig(1), k=5, seed=4)
    assert a.to_json() == b.to_json()
    assert a.predictions.to_csv(syn_ds.label_names) == b.predictions.to_csv(syn_ds.label_names)
    # accuracy recomputed from the dump
    rows = list(csv.DictReader(io.StringIO(a.predictions.to_csv(syn_ds.label_names))))
    assert len(rows) == len(syn_ds)
    hits = sum(r["true_label"] == r["predicted_label"] for r in rows)
    assert a.accuracy == pytest.approx(100 * hits / len(rows))
    scores = [float(r["positive_score"]) for r in rows]
    truth = [syn_ds.label_names.index(r["true_label"]) for r in rows]
    assert a.auroc == pytest.approx(auroc(scores, truth))
    d = json.loads(a.to_json())
    assert d["folds"] == 5 and d["seed"] == 4 and d["spec"]["kind"] == "dmnb"


def test_whole_corpus_vocab_changes_nothing_for_mnb_on_separable(sep_ds):
    a = cross_validate(ModelSpec("mnb"), sep_ds, k=4, whole_corpus_vocab=True)
    assert a.accuracy == 100.0


def test_fold_failure_is_reported(sep_ds):
    with pytest.raises(FoldError, match="fold 0"):
        cross_validate(ModelSpec("knn", {"k": 1000}), sep_ds, k=4)


def test_results_table():
    cm = ConfusionMatrix(np.array([[7, 1], [2, 3]]))
    from lugmis.evaluate import metrics_from_predictions

    rep = metrics_from_predictions("Naive Bayes", [0] * 8 + [1] * 5, [0] * 7 + [1] + [0, 0, 1, 1, 1],
                                   np.linspace(1, 0, 13), ModelSpec("mnb"), 10, 0)
    assert rep.confusion == cm
    text = render_results_table([rep])
    assert text.splitlines()[0].split() == ["Classifier", "Accuracy", "AUROC", "F-Measure"]
    assert "76.92" in text
    rows = list(csv.reader(io.StringIO(render_results_table([rep], "csv"))))
    assert rows[1][:2] == ["Naive Bayes", "76.92"]
    with pytest.raises(ValueError):
        render_results_table([])
