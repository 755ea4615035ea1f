"""k-nearest neighbours with cosine distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .base import (
    DEFAULT_LABELS,
    ModelSpec,
    Prediction,
    TrainedModel,
    as_csr,
    check_labels,
    csr_from_json,
    csr_to_json,
    frozen,
    register,
)


def _normalize_rows(X: sp.csr_matrix) -> sp.csr_matrix:
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return sp.csr_matrix(sp.diags(inv) @ X)


def cosine_distances(Q, X) -> np.ndarray:
    """``1 - cos(q, x)``; an all-zero vector has similarity 0 to everything."""
    sims = (_normalize_rows(as_csr(Q)) @ _normalize_rows(as_csr(X)).T).toarray()
    return 1.0 - sims


def _vote(dist_row, y, k):
    # stable sort: equal distances resolved by lower training index
    nearest = np.argsort(dist_row, kind="stable")[:k]
    votes = np.bincount(y[nearest], minlength=2).astype(np.float64)
    return votes / k


@register("knn")
@dataclass(frozen=True)
class KNNModel(TrainedModel):
    spec: ModelSpec
    dim: int
    label_names: tuple
    train_X: object
    train_y: np.ndarray
    k: int

    def _scores(self, X):
        D = cosine_distances(X, self.train_X)
        return np.vstack([_vote(row, self.train_y, self.k) for row in D]) if D.shape[0] else np.zeros((0, 2))

    def _params_json(self):
        return {"train_X": csr_to_json(self.train_X), "train_y": self.train_y.tolist(), "k": self.k}

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        return cls(spec, dim, label_names, csr_from_json(params["train_X"]),
                   frozen(params["train_y"], np.int64), int(params["k"]))


def train_knn(X, y, k: int = 5, labels=DEFAULT_LABELS) -> KNNModel:
    spec = ModelSpec("knn", {"k": k})
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    if X.shape[0] == 0:
        raise ValueError("knn: empty training set")
    if k > X.shape[0]:
        raise ValueError(f"knn: k={k} exceeds training size {X.shape[0]}")
    return KNNModel(spec, X.shape[1], tuple(labels), X.copy(), frozen(y), int(k))


def knn_predict(train, query, k: int) -> Prediction:
    """Majority vote of the k nearest training vectors to ``query``.

    ``train`` is an ``(X, y)`` pair; scores are vote fractions and ties go to
    the lower label index.
    """
    X, y = train
    return train_knn(X, y, k).predict_one(query)
