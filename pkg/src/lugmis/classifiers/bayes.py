"""Multinomial naive Bayes and its discriminative frequency-estimate variant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..accel.bayes import dmnb_passes
from .base import (
    DEFAULT_LABELS,
    ModelSpec,
    TrainedModel,
    as_csr,
    check_labels,
    frozen,
    register,
    require_both_labels,
)


@register("mnb")
@dataclass(frozen=True)
class MultinomialNB(TrainedModel):
    spec: ModelSpec
    dim: int
    label_names: tuple
    log_prior: np.ndarray
    log_likelihood: np.ndarray

    @property
    def probabilistic(self):
        return True

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = self._check(X)
        return np.asarray(X @ self.log_likelihood.T) + self.log_prior

    def _scores(self, X):
        jll = np.asarray(X @ self.log_likelihood.T) + self.log_prior
        jll -= jll.max(axis=1, keepdims=True)
        p = np.exp(jll)
        return p / p.sum(axis=1, keepdims=True)

    def _params_json(self):
        return {"log_prior": self.log_prior.tolist(), "log_likelihood": self.log_likelihood.tolist()}

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        return cls(spec, dim, label_names, frozen(params["log_prior"], np.float64),
                   frozen(params["log_likelihood"], np.float64))


@register("dmnb")
@dataclass(frozen=True)
class DiscriminativeMNB(MultinomialNB):
    pass


def _weights(sample_weight, n):
    if sample_weight is None:
        return np.ones(n)
    w = np.asarray(sample_weight, dtype=np.float64)
    if w.shape != (n,) or np.any(w < 0):
        raise ValueError("sample_weight must be a nonnegative vector, one per row")
    return w


def _class_feature_sums(X: sp.csr_matrix, y, w) -> np.ndarray:
    onehot = np.zeros((X.shape[0], 2))
    onehot[np.arange(X.shape[0]), y] = w
    return np.asarray((X.T @ onehot).T)


def train_mnb(X, y, alpha: float = 1.0, sample_weight=None, labels=DEFAULT_LABELS) -> MultinomialNB:
    """Multinomial NB: class priors from (weighted) label frequencies,
    per-class feature log-likelihoods from summed feature values + alpha."""
    spec = ModelSpec("mnb", {"alpha": alpha})
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    w = _weights(sample_weight, X.shape[0])
    require_both_labels(y[w > 0], "mnb")
    class_w = np.array([w[y == 0].sum(), w[y == 1].sum()])
    counts = _class_feature_sums(X, y, w) + alpha
    log_lik = np.log(counts) - np.log(counts.sum(axis=1, keepdims=True))
    log_prior = np.log(class_w / class_w.sum())
    return MultinomialNB(spec, X.shape[1], tuple(labels), frozen(log_prior), frozen(log_lik))


def train_dmnb(X, y, passes: int = 1, alpha: float = 1.0, seed: int = 0, sample_weight=None,
               labels=DEFAULT_LABELS) -> DiscriminativeMNB:
    """Discriminative multinomial NB (frequency estimate).

    Count tables and class counts start at ``alpha``. Instances are visited
    in one seeded shuffle of the training order, ``passes`` times; each adds
    ``(1 - p(true class))`` times its weight to the true class's counts.
    """
    spec = ModelSpec("dmnb", {"passes": passes, "alpha": alpha})
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    w = _weights(sample_weight, X.shape[0])
    require_both_labels(y[w > 0], "dmnb")
    d = X.shape[1]
    counts = np.full((2, d), float(alpha))
    totals = counts.sum(axis=1)
    prior = np.full(2, float(alpha))
    order = np.random.default_rng(seed).permutation(X.shape[0]).astype(np.int64)
    dmnb_passes(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data, y, w, order,
                int(passes), counts, totals, prior)
    log_lik = np.log(counts) - np.log(totals)[:, None]
    log_prior = np.log(prior / prior.sum())
    return DiscriminativeMNB(spec, d, tuple(labels), frozen(log_prior), frozen(log_lik))
