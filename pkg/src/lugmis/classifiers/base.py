"""Shared classifier contract: model specs, trained models, predictions."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, ClassVar, Mapping

import numpy as np
import scipy.sparse as sp

from ..corpus import LABEL_NAMES
from ..featurize import SparseVector

KINDS = (
    "mnb",
    "dmnb",
    "logistic_ridge",
    "pegasos",
    "smo_kernel",
    "knn",
    "c45_tree",
    "random_forest",
    "bagging",
    "adaboost_m1",
)
ENSEMBLES = ("bagging", "adaboost_m1")


class SpecError(ValueError):
    """Invalid learner configuration."""


def _positive(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0


def _int_at_least(lo):
    return lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= lo


def _optional(check):
    return lambda v: v is None or check(v)


def _one_of(*values):
    return lambda v: v in values


def _is_bool(v):
    return isinstance(v, bool)


def _real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _fraction(v):
    return _real(v) and 0 < v <= 0.5


# kind -> {param: (default, check, description)}
PARAMS: dict[str, dict[str, tuple[Any, Callable, str]]] = {
    "mnb": {
        "alpha": (1.0, _positive, "smoothing > 0"),
    },
    "dmnb": {
        "passes": (1, _int_at_least(0), "integer >= 0"),
        "alpha": (1.0, _positive, "smoothing > 0"),
    },
    "logistic_ridge": {
        "lam": (1.0, _positive, "ridge penalty > 0"),
        "max_iter": (500, _int_at_least(1), "integer >= 1"),
        "tol": (1e-6, _positive, "> 0"),
    },
    "pegasos": {
        "loss": ("hinge", _one_of("hinge", "log"), "'hinge' or 'log'"),
        "lam": (1e-4, _positive, "> 0"),
        "epochs": (500, _int_at_least(1), "integer >= 1"),
    },
    "smo_kernel": {
        "kernel": ("polynomial", _one_of("linear", "polynomial", "sigmoid"), "linear|polynomial|sigmoid"),
        "gamma": (1.0, _positive, "> 0"),
        "coef0": (1.0, _real, "real"),
        "degree": (2, _int_at_least(1), "integer >= 1"),
        "C": (1.0, _positive, "> 0"),
        "tol": (1e-3, _positive, "> 0"),
        "calibrate": (True, _is_bool, "boolean"),
        "calibration_lam": (1e-2, _positive, "> 0"),
    },
    "knn": {
        "k": (5, _int_at_least(1), "integer >= 1"),
    },
    "c45_tree": {
        "min_leaf": (2, _int_at_least(1), "integer >= 1"),
        "prune": (True, _is_bool, "boolean"),
        "confidence": (0.25, _fraction, "in (0, 0.5]"),
        "max_depth": (None, _optional(_int_at_least(1)), "integer >= 1 or null"),
    },
    "random_forest": {
        "n_trees": (100, _int_at_least(1), "integer >= 1"),
        "max_depth": (None, _optional(_int_at_least(1)), "integer >= 1 or null"),
        "features_per_split": (None, _optional(_int_at_least(1)), "integer >= 1 or null (log2(d)+1)"),
        "min_leaf": (1, _int_at_least(1), "integer >= 1"),
        "bootstrap": (True, _is_bool, "boolean"),
    },
    "bagging": {
        "n_members": (10, _int_at_least(1), "integer >= 1"),
        "bootstrap": (True, _is_bool, "boolean"),
    },
    "adaboost_m1": {
        "n_rounds": (10, _int_at_least(1), "integer >= 1"),
    },
}

_ALIASES = {"lambda": "lam"}


@dataclass(frozen=True)
class ModelSpec:
    """Declarative learner configuration.

    Unspecified hyperparameters take the documented defaults in ``PARAMS``.
    Ensembles (``bagging``, ``adaboost_m1``) need a ``base`` spec.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    base: "ModelSpec | None" = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown learner kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        schema = PARAMS[self.kind]
        given = {_ALIASES.get(k, k): v for k, v in dict(self.params).items()}
        unknown = sorted(set(given) - set(schema))
        if unknown:
            raise SpecError(f"{self.kind}: unknown hyperparameter(s) {', '.join(unknown)}")
        full = {}
        for name, (default, check, desc) in schema.items():
            value = given.get(name, default)
            if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
            if not check(value):
                raise SpecError(f"{self.kind}: {name}={value!r} out of range ({desc})")
            full[name] = value
        object.__setattr__(self, "params", MappingProxyType(full))
        if self.kind in ENSEMBLES:
            if self.base is None:
                raise SpecError(f"{self.kind} requires a base learner spec")
        elif self.base is not None:
            raise SpecError(f"{self.kind} does not take a base learner")

    def __getitem__(self, name):
        return self.params[name]

    def to_dict(self) -> dict:
        d = {"kind": self.kind, **dict(self.params)}
        if self.base is not None:
            d["base"] = self.base.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelSpec":
        d = dict(d)
        if "kind" not in d:
            raise SpecError("learner spec lacks 'kind'")
        kind = d.pop("kind")
        base = d.pop("base", None)
        d.pop("name", None)
        d.pop("ngrams", None)
        return cls(kind, d, cls.from_dict(base) if base is not None else None)

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        if self.base is not None:
            inner += f", base={self.base.describe()}"
        return f"{self.kind}({inner})"


@dataclass(frozen=True)
class Prediction:
    label: int
    scores: tuple[float, float]
    calibrated: bool
    label_name: str = ""


def frozen(a, dtype=None) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def as_csr(X) -> sp.csr_matrix:
    if isinstance(X, SparseVector):
        return X.to_row()
    if sp.issparse(X):
        X = sp.csr_matrix(X, dtype=np.float64)
    else:
        X = sp.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if not X.has_sorted_indices:
        X = X.copy()
        X.sort_indices()
    return X


def check_labels(y, n_rows: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64)
    if y.ndim != 1 or y.shape[0] != n_rows:
        raise ValueError(f"expected {n_rows} labels, got shape {y.shape}")
    if np.any((y != 0) & (y != 1)):
        raise ValueError("labels must be 0 or 1")
    return y


def require_both_labels(y: np.ndarray, who: str) -> None:
    present = set(np.unique(y).tolist())
    missing = {0, 1} - present
    if missing:
        raise ValueError(f"{who}: label {sorted(missing)[0]} absent from training data")


def sign_from_labels(y: np.ndarray) -> np.ndarray:
    """+1 for label 0 (the positive class), -1 for label 1."""
    return np.where(y == 0, 1.0, -1.0)


def margin_scores(f: np.ndarray) -> np.ndarray:
    """Two-column scores from a margin where positive favours label 0."""
    p0 = np.empty_like(f)
    pos = f >= 0
    p0[pos] = 1.0 / (1.0 + np.exp(-f[pos]))
    ef = np.exp(f[~pos])
    p0[~pos] = ef / (1.0 + ef)
    return np.column_stack([p0, 1.0 - p0])


def csr_to_json(X: sp.csr_matrix) -> dict:
    X = sp.csr_matrix(X)
    return {
        "shape": list(X.shape),
        "indptr": X.indptr.tolist(),
        "indices": X.indices.tolist(),
        "data": X.data.tolist(),
    }


def csr_from_json(d: Mapping) -> sp.csr_matrix:
    return sp.csr_matrix(
        (np.array(d["data"], dtype=np.float64), np.array(d["indices"], dtype=np.int64),
         np.array(d["indptr"], dtype=np.int64)),
        shape=tuple(d["shape"]),
    )


_REGISTRY: dict[str, type] = {}


def register(kind: str):
    def deco(cls):
        cls.kind = kind
        _REGISTRY[kind] = cls
        return cls
    return deco


def model_class(kind: str) -> type:
    return _REGISTRY[kind]


class TrainedModel:
    """Immutable fitted model with a binary ``scores`` method.

    Subclasses are frozen dataclasses carrying ``spec``, ``dim`` and
    ``label_names`` plus their fitted parameters.
    """

    kind: ClassVar[str] = ""
    spec: ModelSpec
    dim: int
    label_names: tuple

    @property
    def probabilistic(self) -> bool:
        return False

    def _scores(self, X: sp.csr_matrix) -> np.ndarray:
        raise NotImplementedError

    def _check(self, X) -> sp.csr_matrix:
        X = as_csr(X)
        if X.shape[1] != self.dim:
            raise ValueError(f"model expects {self.dim} features, got {X.shape[1]}")
        return X

    def scores(self, X) -> np.ndarray:
        """Per-label scores, shape (n, 2); each row sums to 1."""
        return self._scores(self._check(X))

    predict_proba = scores

    def predict(self, X) -> np.ndarray:
        # argmax picks the lower index on ties
        return np.argmax(self.scores(X), axis=1)

    def predict_one(self, x) -> Prediction:
        s = self.scores(x)[0]
        label = int(np.argmax(s))
        return Prediction(label, (float(s[0]), float(s[1])), self.probabilistic, self.label_names[label])

    # serialization hooks
    def _params_json(self) -> dict:
        raise NotImplementedError

    @classmethod
    def _from_params_json(cls, spec: ModelSpec, dim: int, label_names: tuple, params: Mapping):
        raise NotImplementedError


DEFAULT_LABELS = LABEL_NAMES
