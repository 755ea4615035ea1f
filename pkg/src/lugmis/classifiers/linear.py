"""Linear models: ridge-penalized logistic regression and Pegasos."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.special import expit

from ..accel.sgd import pegasos_epoch
from .base import (
    DEFAULT_LABELS,
    ModelSpec,
    TrainedModel,
    as_csr,
    check_labels,
    frozen,
    margin_scores,
    register,
    sign_from_labels,
)


@register("logistic_ridge")
@dataclass(frozen=True)
class LinearModel(TrainedModel):
    """Margin ``f(x) = w.x + b``; positive margins favour label 0."""

    spec: ModelSpec
    dim: int
    label_names: tuple
    weights: np.ndarray
    bias: float
    converged: bool = True
    calibrated: bool = field(default=True)

    @property
    def probabilistic(self):
        return self.calibrated

    def decision_function(self, X) -> np.ndarray:
        X = self._check(X)
        return np.asarray(X @ self.weights).ravel() + self.bias

    def _scores(self, X):
        return margin_scores(np.asarray(X @ self.weights).ravel() + self.bias)

    def _params_json(self):
        return {"weights": self.weights.tolist(), "bias": self.bias, "converged": self.converged,
                "calibrated": self.calibrated}

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        return cls(spec, dim, label_names, frozen(params["weights"], np.float64), float(params["bias"]),
                   bool(params["converged"]), bool(params["calibrated"]))


@register("pegasos")
@dataclass(frozen=True)
class PegasosModel(LinearModel):
    pass


def _log1pexp(z):
    # log(1 + exp(z)) without overflow
    return np.where(z > 0, z + np.log1p(np.exp(-np.abs(z))), np.log1p(np.exp(np.minimum(z, 0))))


def fit_logistic(X, sign, lam, max_iter=500, tol=1e-6, sample_weight=None):
    """Minimize ``lam/2 |w|^2 + sum_i s_i log(1 + exp(-t_i (w.x_i + b)))``.

    The bias is not penalized. Returns ``(w, b, converged)``.
    """
    X = as_csr(X)
    n, d = X.shape
    sw = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    Xt = X.T.tocsr()

    def objective(theta):
        w = theta[:d]
        b = theta[d]
        z = sign * (np.asarray(X @ w).ravel() + b)
        loss = float(np.sum(sw * _log1pexp(-z))) + 0.5 * lam * float(w @ w)
        # d loss / d z_i = -sigmoid(-z_i)
        r = -sw * sign * expit(-z)
        grad = np.empty(d + 1)
        grad[:d] = np.asarray(Xt @ r).ravel() + lam * w
        grad[d] = r.sum()
        return loss, grad

    res = minimize(objective, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                   options={"maxiter": int(max_iter), "gtol": float(tol), "ftol": 1e-12})
    return res.x[:d].copy(), float(res.x[d]), bool(res.success)


def train_logistic_ridge(X, y, lam: float = 1.0, max_iter: int = 500, tol: float = 1e-6,
                         sample_weight=None, labels=DEFAULT_LABELS) -> LinearModel:
    """L2-penalized (Gaussian-prior MAP) binary logistic regression.

    Non-convergence within ``max_iter`` is reported through
    ``model.converged`` rather than raised.
    """
    spec = ModelSpec("logistic_ridge", {"lam": lam, "max_iter": max_iter, "tol": tol})
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    w, b, ok = fit_logistic(X, sign_from_labels(y), lam, max_iter, tol, sample_weight)
    return LinearModel(spec, X.shape[1], tuple(labels), frozen(w), b, ok, True)


def pegasos_objective(X, y, weights, bias, lam, loss="hinge") -> float:
    """``lam/2 |(w, b)|^2 + mean loss``, the objective Pegasos descends."""
    X = as_csr(X)
    z = sign_from_labels(np.asarray(y)) * (np.asarray(X @ weights).ravel() + bias)
    losses = np.maximum(0.0, 1.0 - z) if loss == "hinge" else _log1pexp(-z)
    return 0.5 * lam * (float(weights @ weights) + bias * bias) + float(losses.mean())


def train_pegasos(X, y, loss: str = "hinge", lam: float = 1e-4, epochs: int = 500, seed: int = 0,
                  callback=None, labels=DEFAULT_LABELS) -> PegasosModel:
    """Pegasos stochastic sub-gradient descent on the primal SVM objective.

    Step size ``1/(lam t)``, one seeded permutation per epoch, bias as an
    always-on (and regularized) extra feature. ``callback(epoch, w, b)`` is
    called after every epoch with a snapshot of the weights.
    """
    spec = ModelSpec("pegasos", {"loss": loss, "lam": lam, "epochs": epochs})
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    n, d = X.shape
    Xa = sp.hstack([X, np.ones((n, 1))], format="csr")
    Xa.sort_indices()
    indptr = Xa.indptr.astype(np.int64)
    indices = Xa.indices.astype(np.int64)
    sign = sign_from_labels(y)
    loss_code = 0 if loss == "hinge" else 1
    v = np.zeros(d + 1)
    state = np.array([1.0, 0.0])
    rng = np.random.default_rng(seed)
    for epoch in range(epochs):
        order = rng.permutation(n).astype(np.int64)
        pegasos_epoch(indptr, indices, Xa.data, sign, order, float(lam), loss_code, v, state)
        if callback is not None:
            w_full = state[0] * v
            callback(epoch, w_full[:d].copy(), float(w_full[d]))
    w_full = state[0] * v
    return PegasosModel(spec, d, tuple(labels), frozen(w_full[:d]), float(w_full[d]), True, loss == "log")
