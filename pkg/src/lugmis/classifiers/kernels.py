"""Kernel functions on sparse document vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..featurize import SparseVector

KERNEL_KINDS = ("linear", "polynomial", "sigmoid")


@dataclass(frozen=True)
class KernelConfig:
    """``linear``: x.y; ``polynomial``: (gamma x.y + coef0)^degree;
    ``sigmoid``: tanh(gamma x.y + coef0). ``degree`` only affects the
    polynomial kernel.
    """

    kind: str = "linear"
    gamma: float = 1.0
    coef0: float = 0.0
    degree: int = 1

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}")
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError("degree must be an integer >= 1")

    def apply(self, dots):
        """Map inner products to kernel values (scalars or arrays)."""
        if self.kind == "linear":
            return dots
        if self.kind == "polynomial":
            return (self.gamma * dots + self.coef0) ** int(self.degree)
        return np.tanh(self.gamma * dots + self.coef0)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "gamma": self.gamma, "coef0": self.coef0, "degree": int(self.degree)}


def kernel_eval(cfg: KernelConfig, x: SparseVector, y: SparseVector) -> float:
    if x.dim != y.dim:
        raise ValueError(f"dimensionality mismatch: {x.dim} vs {y.dim}")
    return float(cfg.apply(x.dot(y)))


def gram(cfg: KernelConfig, A, B) -> np.ndarray:
    """Dense kernel matrix between the rows of sparse matrices A and B."""
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimensionality mismatch: {A.shape[1]} vs {B.shape[1]}")
    dots = A @ B.T
    dots = dots.toarray() if sp.issparse(dots) else np.asarray(dots)
    return np.asarray(cfg.apply(dots), dtype=np.float64)
