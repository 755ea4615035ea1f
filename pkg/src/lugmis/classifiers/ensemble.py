"""Bagging and AdaBoost.M1 over any base learner spec."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import (
    DEFAULT_LABELS,
    ModelSpec,
    SpecError,
    TrainedModel,
    as_csr,
    check_labels,
    frozen,
    register,
)

# base learners that accept per-instance weights directly
WEIGHTED_KINDS = ("mnb", "dmnb", "logistic_ridge", "c45_tree")


def member_seed(seed: int, index: int):
    """Child (rng, integer seed) for ensemble member ``index``."""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return np.random.default_rng(ss), int(ss.generate_state(1, dtype=np.uint32)[0])


MAX_REDRAWS = 100


def _resample(rng, y, p=None):
    """Sorted bootstrap indices; redrawn while a label is missing, so every
    member sees both labels (tiny training sets can otherwise lose one)."""
    n = y.shape[0]
    for _ in range(MAX_REDRAWS):
        idx = np.sort(rng.choice(n, size=n, replace=True, p=p) if p is not None else rng.integers(0, n, n))
        if np.unique(y[idx]).size == 2:
            return idx
    raise ValueError(f"no bootstrap with both labels in {MAX_REDRAWS} draws")


def _members_json(members):
    from .serialize import model_to_dict

    return [model_to_dict(m) for m in members]


def _members_from_json(items):
    from .serialize import model_from_dict

    return tuple(model_from_dict(m) for m in items)


@register("bagging")
@dataclass(frozen=True)
class BaggedModel(TrainedModel):
    spec: ModelSpec
    dim: int
    label_names: tuple
    members: tuple

    @property
    def probabilistic(self):
        return all(m.probabilistic for m in self.members)

    def _scores(self, X):
        return sum(m._scores(X) for m in self.members) / len(self.members)

    def _params_json(self):
        return {"members": _members_json(self.members)}

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        return cls(spec, dim, label_names, _members_from_json(params["members"]))


@register("adaboost_m1")
@dataclass(frozen=True)
class BoostedModel(TrainedModel):
    """Weighted hard vote; scores are the normalized vote mass per label."""

    spec: ModelSpec
    dim: int
    label_names: tuple
    members: tuple
    member_weights: np.ndarray

    def _scores(self, X):
        votes = np.zeros((X.shape[0], 2))
        rows = np.arange(X.shape[0])
        for m, a in zip(self.members, self.member_weights):
            votes[rows, m.predict(X)] += a
        total = votes.sum(axis=1, keepdims=True)
        return votes / total

    def _params_json(self):
        return {"members": _members_json(self.members), "member_weights": self.member_weights.tolist()}

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        return cls(spec, dim, label_names, _members_from_json(params["members"]),
                   frozen(params["member_weights"], np.float64))


def train_bagging(base: ModelSpec, X, y, n_members: int = 10, seed: int = 0, bootstrap: bool = True,
                  labels=DEFAULT_LABELS) -> BaggedModel:
    """Average of ``n_members`` base models, each fit on a bootstrap resample
    of the training rows. ``bootstrap=False`` fits every member on the full
    set (useful as a degenerate check)."""
    from . import train

    spec = ModelSpec("bagging", {"n_members": n_members, "bootstrap": bootstrap}, base)
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    n = X.shape[0]
    members = []
    for i in range(n_members):
        rng, child = member_seed(seed, i)
        idx = _resample(rng, y) if bootstrap else np.arange(n)
        members.append(train(base, X[idx], y[idx], seed=child, labels=labels))
    return BaggedModel(spec, X.shape[1], tuple(labels), tuple(members))


def train_adaboost_m1(base: ModelSpec, X, y, n_rounds: int = 10, seed: int = 0, callback=None,
                      labels=DEFAULT_LABELS) -> BoostedModel:
    """AdaBoost.M1.

    Round weights are ``log((1 - eps) / eps)``. Learners in
    ``WEIGHTED_KINDS`` receive instance weights scaled to sum to ``n``;
    others are fit on a weighted resample. Boosting stops when a round's
    error is 0 or at least 0.5; that round's model is kept (weight 1) only
    if it is the first. ``callback(round, weights, eps, member_weight)``
    sees the normalized instance weights used in each round.
    """
    from . import train

    if base.kind in ("bagging", "adaboost_m1"):
        raise SpecError("adaboost_m1: nested ensembles are not supported as the base learner")
    spec = ModelSpec("adaboost_m1", {"n_rounds": n_rounds}, base)
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    n = X.shape[0]
    w = np.full(n, 1.0 / n)
    members, alphas = [], []
    for r in range(n_rounds):
        rng, child = member_seed(seed, r)
        if base.kind in WEIGHTED_KINDS:
            model = train(base, X, y, seed=child, sample_weight=w * n, labels=labels)
        else:
            idx = _resample(rng, y, w)
            model = train(base, X[idx], y[idx], seed=child, labels=labels)
        wrong = model.predict(X) != y
        eps = float(w[wrong].sum())
        if eps >= 0.5 or eps == 0.0:
            if not members:
                members.append(model)
                alphas.append(1.0)
                if callback is not None:
                    callback(r, w.copy(), eps, 1.0)
            break
        alpha = math.log((1.0 - eps) / eps)
        members.append(model)
        alphas.append(alpha)
        if callback is not None:
            callback(r, w.copy(), eps, alpha)
        w = np.where(wrong, w * (1.0 - eps) / eps, w)
        w = w / w.sum()
    return BoostedModel(spec, X.shape[1], tuple(labels), tuple(members), frozen(alphas, np.float64))
