"""C4.5-style decision trees and random forests.

Splits are binary thresholds ``x_j <= t`` on (nonnegative) feature values,
chosen by gain ratio. Instances carry weights, which is how bootstrap
multiplicities and boosting weights reach the tree grower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
import scipy.sparse as sp

from ..accel.tree import grow_tree, tree_predict
from .base import (
    DEFAULT_LABELS,
    ModelSpec,
    TrainedModel,
    as_csr,
    check_labels,
    frozen,
    register,
)

MIN_GAIN = 1e-10


@dataclass(frozen=True)
class TreeArrays:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    dist: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] >= 0:
                depth[self.left[node]] = depth[node] + 1
                depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    def predict_into(self, X: sp.csr_matrix, out: np.ndarray) -> None:
        tree_predict(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data,
                     self.feature, self.threshold, self.left, self.right, self.dist, out)

    def to_json(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "dist": self.dist.tolist(),
        }

    @classmethod
    def from_json(cls, d) -> "TreeArrays":
        return cls(frozen(d["feature"], np.int64), frozen(d["threshold"], np.float64),
                   frozen(d["left"], np.int64), frozen(d["right"], np.int64),
                   frozen(np.asarray(d["dist"], dtype=np.float64).reshape(-1, 2)))


def _csc_parts(X: sp.csr_matrix):
    Xc = sp.csc_matrix(X)
    Xc.sort_indices()
    if Xc.nnz and Xc.data.min() < 0:
        raise ValueError("tree learners expect nonnegative feature values")
    return Xc.indptr.astype(np.int64), Xc.indices.astype(np.int64), Xc.data.astype(np.float64)


def grow(X, y, w, min_leaf=2, max_depth=None, k_features=0, rng_seed=1, csc=None) -> TreeArrays:
    """Grow an unpruned tree. ``k_features <= 0`` examines every feature."""
    X = as_csr(X)
    col_ptr, row_idx, col_val = csc if csc is not None else _csc_parts(X)
    rows = np.flatnonzero(w > 0).astype(np.int64)
    state = np.array([int(rng_seed) % 0xFFFFFFFF or 1], dtype=np.int64)
    feature, threshold, left, right, dist, n = grow_tree(
        col_ptr, row_idx, col_val, X.shape[1], y.astype(np.int64), w.astype(np.float64), rows,
        float(min_leaf), -1 if max_depth is None else int(max_depth), int(k_features), state, MIN_GAIN,
    )
    return TreeArrays(frozen(feature[:n]), frozen(threshold[:n]), frozen(left[:n]), frozen(right[:n]),
                      frozen(dist[:n]))


def added_errors(n: float, e: float, confidence: float) -> float:
    """Extra errors on top of ``e`` observed errors out of ``n`` at the
    upper confidence limit ``confidence`` of the binomial error rate."""
    if e < 1:
        base = n * (1 - confidence ** (1 / n))
        if e == 0:
            return base
        return base + e * (added_errors(n, 1, confidence) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = NormalDist().inv_cdf(1 - confidence)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n)
    return r * n - e


def prune(tree: TreeArrays, confidence: float) -> TreeArrays:
    """Pessimistic-error subtree replacement, bottom-up."""
    feature = tree.feature.copy()
    left, right, dist = tree.left, tree.right, tree.dist
    # children always have larger ids than their parent
    estimate = np.zeros(tree.n_nodes)
    for node in range(tree.n_nodes - 1, -1, -1):
        n = float(dist[node].sum())
        e = n - float(dist[node].max())
        leaf_est = e + added_errors(n, e, confidence)
        if feature[node] < 0:
            estimate[node] = leaf_est
            continue
        sub = estimate[left[node]] + estimate[right[node]]
        if leaf_est <= sub + 0.1:
            feature[node] = -1
            estimate[node] = leaf_est
        else:
            estimate[node] = sub
    return _compact(TreeArrays(feature, tree.threshold, left, right, dist))


def _compact(tree: TreeArrays) -> TreeArrays:
    keep = []
    new_id = {}
    stack = [0]
    while stack:
        node = stack.pop()
        new_id[node] = len(keep)
        keep.append(node)
        if tree.feature[node] >= 0:
            stack.append(int(tree.right[node]))
            stack.append(int(tree.left[node]))
    keep_arr = np.array(keep, dtype=np.int64)
    feature = tree.feature[keep_arr]
    left = np.array([new_id[int(tree.left[k])] if tree.feature[k] >= 0 else -1 for k in keep], dtype=np.int64)
    right = np.array([new_id[int(tree.right[k])] if tree.feature[k] >= 0 else -1 for k in keep], dtype=np.int64)
    threshold = np.where(feature >= 0, tree.threshold[keep_arr], 0.0)
    return TreeArrays(frozen(feature), frozen(threshold), frozen(left), frozen(right), frozen(tree.dist[keep_arr]))


@register("c45_tree")
@dataclass(frozen=True)
class DecisionTree(TrainedModel):
    spec: ModelSpec
    dim: int
    label_names: tuple
    tree: TreeArrays

    def _scores(self, X):
        out = np.zeros((X.shape[0], 2))
        self.tree.predict_into(X, out)
        return out

    def _params_json(self):
        return {"tree": self.tree.to_json()}

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        return cls(spec, dim, label_names, TreeArrays.from_json(params["tree"]))


@register("random_forest")
@dataclass(frozen=True)
class RandomForest(TrainedModel):
    spec: ModelSpec
    dim: int
    label_names: tuple
    trees: tuple

    def _scores(self, X):
        out = np.zeros((X.shape[0], 2))
        for t in self.trees:
            t.predict_into(X, out)
        return out / len(self.trees)

    def _params_json(self):
        return {"trees": [t.to_json() for t in self.trees]}

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        return cls(spec, dim, label_names, tuple(TreeArrays.from_json(t) for t in params["trees"]))


def _weights(sample_weight, n):
    if sample_weight is None:
        return np.ones(n)
    w = np.asarray(sample_weight, dtype=np.float64)
    if w.shape != (n,) or np.any(w < 0):
        raise ValueError("sample_weight must be a nonnegative vector, one per row")
    return w


def train_c45(X, y, min_leaf: int = 2, prune_tree: bool = True, confidence: float = 0.25,
              max_depth: int | None = None, sample_weight=None, labels=DEFAULT_LABELS) -> DecisionTree:
    """Gain-ratio decision tree, optionally pruned by pessimistic error.

    Leaves hold class weight distributions; equal gain ratios resolve to
    the lowest feature index.
    """
    spec = ModelSpec("c45_tree", {"min_leaf": min_leaf, "prune": prune_tree, "confidence": confidence,
                                  "max_depth": max_depth})
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    w = _weights(sample_weight, X.shape[0])
    tree = grow(X, y, w, min_leaf=min_leaf, max_depth=max_depth)
    if prune_tree:
        tree = prune(tree, confidence)
    return DecisionTree(spec, X.shape[1], tuple(labels), tree)


def default_features_per_split(d: int) -> int:
    return int(math.log2(d)) + 1 if d > 1 else 1


def train_random_forest(X, y, n_trees: int = 100, max_depth: int | None = None,
                        features_per_split: int | None = None, seed: int = 0, min_leaf: int = 1,
                        bootstrap: bool = True, labels=DEFAULT_LABELS) -> RandomForest:
    """Bagged unpruned trees with a random feature subset at every split.

    ``features_per_split`` defaults to ``int(log2 d) + 1``; a node keeps
    drawing features past that count until some split has positive gain.
    Tree ``i`` draws its bootstrap and feature order from ``(seed, i)``.
    """
    spec = ModelSpec("random_forest", {"n_trees": n_trees, "max_depth": max_depth,
                                       "features_per_split": features_per_split, "min_leaf": min_leaf,
                                       "bootstrap": bootstrap})
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    n, d = X.shape
    k = features_per_split if features_per_split is not None else default_features_per_split(d)
    csc = _csc_parts(X)
    trees = []
    for i in range(n_trees):
        ss = np.random.SeedSequence([int(seed), i])
        rng = np.random.default_rng(ss)
        if bootstrap:
            w = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64)
        else:
            w = np.ones(n)
        tree_seed = int(ss.generate_state(1, dtype=np.uint32)[0])
        trees.append(grow(X, y, w, min_leaf=min_leaf, max_depth=max_depth, k_features=k,
                          rng_seed=tree_seed, csc=csc))
    return RandomForest(spec, d, tuple(labels), tuple(trees))
