"""Kernel functions for the support vector classifier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LINEAR = "linear"
RBF = "rbf"
POLYNOMIAL = "poly"


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    gamma: float | None = None
    degree: int | None = None
    coef0: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == LINEAR:
            return
        if self.kind == RBF:
            if self.gamma is None or self.gamma <= 0:
                raise ValueError(f"rbf kernel needs gamma > 0, got {self.gamma}")
            return
        if self.kind == POLYNOMIAL:
            if self.degree is None or self.degree < 1 or int(self.degree) != self.degree:
                raise ValueError(f"polynomial kernel needs integer degree >= 1, got {self.degree}")
            return
        raise ValueError(f"unknown kernel kind {self.kind!r}")

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls(LINEAR)

    @classmethod
    def rbf(cls, gamma: float) -> "KernelSpec":
        return cls(RBF, gamma=gamma)

    @classmethod
    def polynomial(cls, degree: int, coef0: float = 0.0) -> "KernelSpec":
        return cls(POLYNOMIAL, degree=degree, coef0=coef0)


def kernel_eval(spec: KernelSpec, u, v) -> float:
    """Similarity of two equally sized vectors under the given kernel."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if spec.kind == LINEAR:
        return float(np.dot(u, v))
    if spec.kind == RBF:
        diff = u - v
        return float(np.exp(-spec.gamma * np.dot(diff, diff)))
    return float((np.dot(u, v) + spec.coef0) ** spec.degree)


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise kernel values between the rows of a and the rows of b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    if spec.kind == LINEAR:
        return a @ b.T
    if spec.kind == RBF:
        sq = (
            np.sum(a * a, axis=1)[:, None]
            + np.sum(b * b, axis=1)[None, :]
            - 2.0 * (a @ b.T)
        )
        return np.exp(-spec.gamma * np.maximum(sq, 0.0))
    return (a @ b.T + spec.coef0) ** spec.degree
