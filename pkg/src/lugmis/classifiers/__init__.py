"""Binary text classifiers behind one ``train(spec, X, y)`` entry point.

Label index 0 is the positive class ("misinformation"); every model's
``scores`` returns an ``(n, 2)`` array whose rows sum to 1.
"""

from __future__ import annotations

from .base import (
    DEFAULT_LABELS,
    ENSEMBLES,
    KINDS,
    PARAMS,
    ModelSpec,
    Prediction,
    SpecError,
    TrainedModel,
)
from .bayes import DiscriminativeMNB, MultinomialNB, train_dmnb, train_mnb
from .ensemble import BaggedModel, BoostedModel, train_adaboost_m1, train_bagging
from .kernels import KernelConfig, gram, kernel_eval
from .knn import KNNModel, knn_predict, train_knn
from .linear import LinearModel, PegasosModel, train_logistic_ridge, train_pegasos
from .svm import KernelSVM, kernel_from_spec, train_smo
from .tree import DecisionTree, RandomForest, train_c45, train_random_forest


def train(spec: ModelSpec, X, y, seed: int = 0, sample_weight=None, labels=DEFAULT_LABELS) -> TrainedModel:
    """Fit the learner described by ``spec``.

    ``sample_weight`` is honoured by mnb, dmnb, logistic_ridge and c45_tree
    and rejected elsewhere.
    """
    p = spec.params
    k = spec.kind
    if sample_weight is not None and k not in ("mnb", "dmnb", "logistic_ridge", "c45_tree"):
        raise SpecError(f"{k} does not accept instance weights")
    if k == "mnb":
        return train_mnb(X, y, p["alpha"], sample_weight=sample_weight, labels=labels)
    if k == "dmnb":
        return train_dmnb(X, y, p["passes"], p["alpha"], seed=seed, sample_weight=sample_weight, labels=labels)
    if k == "logistic_ridge":
        return train_logistic_ridge(X, y, p["lam"], p["max_iter"], p["tol"], sample_weight=sample_weight,
                                    labels=labels)
    if k == "pegasos":
        return train_pegasos(X, y, p["loss"], p["lam"], p["epochs"], seed=seed, labels=labels)
    if k == "smo_kernel":
        return train_smo(X, y, kernel_from_spec(spec), p["C"], p["tol"], p["calibrate"], p["calibration_lam"],
                         labels=labels)
    if k == "knn":
        return train_knn(X, y, p["k"], labels=labels)
    if k == "c45_tree":
        return train_c45(X, y, p["min_leaf"], p["prune"], p["confidence"], p["max_depth"],
                         sample_weight=sample_weight, labels=labels)
    if k == "random_forest":
        return train_random_forest(X, y, p["n_trees"], p["max_depth"], p["features_per_split"], seed=seed,
                                   min_leaf=p["min_leaf"], bootstrap=p["bootstrap"], labels=labels)
    if k == "bagging":
        return train_bagging(spec.base, X, y, p["n_members"], seed=seed, bootstrap=p["bootstrap"], labels=labels)
    if k == "adaboost_m1":
        return train_adaboost_m1(spec.base, X, y, p["n_rounds"], seed=seed, labels=labels)
    raise SpecError(f"unknown learner kind {k!r}")  # pragma: no cover


__all__ = [
    "KINDS", "ENSEMBLES", "PARAMS", "ModelSpec", "Prediction", "SpecError", "TrainedModel", "KernelConfig",
    "kernel_eval", "gram", "train", "train_mnb", "train_dmnb", "train_logistic_ridge", "train_pegasos",
    "train_smo", "train_knn", "knn_predict", "train_c45", "train_random_forest", "train_bagging",
    "train_adaboost_m1", "MultinomialNB", "DiscriminativeMNB", "LinearModel", "PegasosModel", "KernelSVM",
    "KNNModel", "DecisionTree", "RandomForest", "BaggedModel", "BoostedModel",
]
