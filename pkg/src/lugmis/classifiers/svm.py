"""Kernel SVM trained with sequential minimal optimization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..accel.smo import smo_rho, smo_solve
from .base import (
    DEFAULT_LABELS,
    ModelSpec,
    TrainedModel,
    as_csr,
    check_labels,
    csr_from_json,
    csr_to_json,
    frozen,
    margin_scores,
    register,
    require_both_labels,
    sign_from_labels,
)
from .kernels import KernelConfig, gram
from .linear import fit_logistic


@dataclass(frozen=True)
class SolverInfo:
    n_updates: int
    kkt_gap: float
    converged: bool


@register("smo_kernel")
@dataclass(frozen=True)
class KernelSVM(TrainedModel):
    """``f(x) = sum_i coef_i K(sv_i, x) - rho`` with ``coef_i = alpha_i t_i``.

    With a calibrator ``(a, c)`` the label-0 probability is
    ``sigmoid(a f(x) + c)``.
    """

    spec: ModelSpec
    dim: int
    label_names: tuple
    kernel: KernelConfig
    support: object
    coef: np.ndarray
    rho: float
    calibrator: tuple | None
    info: SolverInfo

    @property
    def probabilistic(self):
        return self.calibrator is not None

    @property
    def converged(self):
        return self.info.converged

    def decision_function(self, X) -> np.ndarray:
        return self._decision(self._check(X))

    def _decision(self, X):
        if self.coef.size == 0:
            return np.full(X.shape[0], -self.rho)
        return gram(self.kernel, X, self.support) @ self.coef - self.rho

    def _scores(self, X):
        f = self._decision(X)
        if self.calibrator is not None:
            a, c = self.calibrator
            f = a * f + c
        return margin_scores(f)

    def _params_json(self):
        return {
            "kernel": self.kernel.to_dict(),
            "support": csr_to_json(self.support),
            "coef": self.coef.tolist(),
            "rho": self.rho,
            "calibrator": list(self.calibrator) if self.calibrator is not None else None,
            "info": {"n_updates": self.info.n_updates, "kkt_gap": self.info.kkt_gap,
                     "converged": self.info.converged},
        }

    @classmethod
    def _from_params_json(cls, spec, dim, label_names, params):
        cal = params["calibrator"]
        return cls(spec, dim, label_names, KernelConfig(**params["kernel"]), csr_from_json(params["support"]),
                   frozen(params["coef"], np.float64), float(params["rho"]),
                   tuple(float(v) for v in cal) if cal is not None else None,
                   SolverInfo(**params["info"]))


def train_smo(X, y, kernel: KernelConfig | None = None, C: float = 1.0, tol: float = 1e-3,
              calibrate: bool = False, calibration_lam: float = 1e-2, max_updates: int | None = None,
              labels=DEFAULT_LABELS) -> KernelSVM:
    """Solve the soft-margin SVM dual by pairwise multiplier updates.

    Stops when the maximal KKT violation drops below ``tol`` or after
    ``max_updates`` pair updates (default ``100 n``), in which case
    ``model.converged`` is False. Sigmoid kernels may give an indefinite
    Gram matrix; the solver still terminates. With ``calibrate`` a
    one-dimensional ridge logistic model is fitted on the training
    decision values.
    """
    kernel = kernel or KernelConfig()
    spec = ModelSpec("smo_kernel", {
        "kernel": kernel.kind, "gamma": kernel.gamma, "coef0": kernel.coef0, "degree": int(kernel.degree),
        "C": C, "tol": tol, "calibrate": calibrate, "calibration_lam": calibration_lam,
    })
    X = as_csr(X)
    y = check_labels(y, X.shape[0])
    require_both_labels(y, "smo_kernel")
    n = X.shape[0]
    t = sign_from_labels(y)
    K = gram(kernel, X, X)
    alpha = np.zeros(n)
    G = -np.ones(n)
    cap = 100 * n if max_updates is None else int(max_updates)
    n_updates, gap, converged = smo_solve(K, t, float(C), float(tol), cap, alpha, G)
    rho = float(smo_rho(t, float(C), alpha, G))
    sv = alpha > 0
    coef = alpha[sv] * t[sv]
    calibrator = None
    if calibrate:
        f = K[:, sv] @ coef - rho
        a, c, _ = fit_logistic(f[:, None], t, calibration_lam)
        calibrator = (float(a[0]), float(c))
    info = SolverInfo(int(n_updates), float(gap), bool(converged))
    return KernelSVM(spec, X.shape[1], tuple(labels), kernel, X[sv], frozen(coef), rho, calibrator, info)


def kernel_from_spec(spec: ModelSpec) -> KernelConfig:
    return KernelConfig(spec["kernel"], spec["gamma"], spec["coef0"], spec["degree"])
