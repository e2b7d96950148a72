"""Soft-margin kernel support vector classifier.

The dual problem is solved by pairwise coordinate ascent on the maximal
KKT-violating pair (ties to the lowest index), which is deterministic and
needs no random state. Labels {0, 1} map to {-1, +1} internally; the decision
function is sum_i dual_coef_i * K(sv_i, x) + bias with dual_coef = alpha * y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import FeatureMatrix
from .kernels import KernelSpec, kernel_matrix

SUPPORT_EPS = 1e-12


@dataclass(frozen=True)
class SvcModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    kernel: KernelSpec
    c: float
    converged: bool
    n_iter: int

    decision_threshold = 0.0

    @property
    def n_features(self) -> int:
        return int(self.support_vectors.shape[1])

    def scores(self, x: np.ndarray) -> np.ndarray:
        """Signed decision values for each row of x; positive means treated."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        if self.support_vectors.shape[0] == 0:
            return np.full(x.shape[0], self.bias)
        k = kernel_matrix(self.kernel, x, self.support_vectors)
        return k @ self.dual_coefs + self.bias

    def score(self, x) -> float:
        return float(self.scores(np.atleast_2d(x))[0])

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.scores(x) > self.decision_threshold).astype(int)


def fit_svc(
    data: FeatureMatrix,
    c: float = 1.0,
    kernel: KernelSpec | None = None,
    tol: float = 1e-3,
    max_iter: int = 20_000,
) -> SvcModel:
    """Fit the dual soft-margin problem.

    Iterates single pair updates until the largest KKT violation drops below
    tol or max_iter updates have been spent; in the latter case the model is
    returned with converged=False. Rows with |alpha| > 1e-12 are retained as
    support vectors. Features are assumed pre-normalized by the caller.
    """
    if kernel is None:
        kernel = KernelSpec.linear()
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    classes = np.unique(data.y)
    if classes.size < 2:
        raise ValueError("training data contains a single class")

    x = data.x
    y = np.where(data.y == 1, 1.0, -1.0)
    n = x.shape[0]
    k = kernel_matrix(kernel, x, x)

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 0.5 a'Qa - 1'a at alpha = 0
    bound_eps = 1e-12 * c

    converged = False
    it = 0
    while it < max_iter:
        yg = -y * grad
        up = ((y > 0) & (alpha < c - bound_eps)) | ((y < 0) & (alpha > bound_eps))
        low = ((y < 0) & (alpha < c - bound_eps)) | ((y > 0) & (alpha > bound_eps))
        up_vals = np.where(up, yg, -np.inf)
        low_vals = np.where(low, yg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        m_up = up_vals[i]
        m_low = low_vals[j]
        if m_up - m_low < tol:
            converged = True
            break

        s = y[i] * y[j]
        eta = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if eta <= 0.0:
            eta = 1e-12
        # Move along the equality constraint: d(alpha_i) = -s * d(alpha_j).
        t = -(grad[j] - s * grad[i]) / eta
        if s > 0:
            total = alpha[i] + alpha[j]
            lo, hi = max(0.0, total - c), min(c, total)
        else:
            diff = alpha[i] - alpha[j]
            lo, hi = max(0.0, -diff), min(c, c - diff)
        new_j = min(hi, max(lo, alpha[j] + t))
        dj = new_j - alpha[j]
        if abs(dj) < 1e-14:
            break  # numerically stuck on the most violating pair
        di = -s * dj
        alpha[i] += di
        alpha[j] = new_j
        grad += y * (k[:, i] * (y[i] * di) + k[:, j] * (y[j] * dj))
        it += 1

    yg = -y * grad
    free = (alpha > bound_eps) & (alpha < c - bound_eps)
    if np.any(free):
        bias = float(np.mean(yg[free]))
    else:
        up = ((y > 0) & (alpha < c - bound_eps)) | ((y < 0) & (alpha > bound_eps))
        low = ((y < 0) & (alpha < c - bound_eps)) | ((y > 0) & (alpha > bound_eps))
        m_up = float(np.max(np.where(up, yg, -np.inf)))
        m_low = float(np.min(np.where(low, yg, np.inf)))
        bias = (m_up + m_low) / 2.0

    support = alpha > SUPPORT_EPS
    return SvcModel(
        support_vectors=x[support].copy(),
        dual_coefs=(alpha * y)[support].copy(),
        bias=bias,
        kernel=kernel,
        c=c,
        converged=converged,
        n_iter=it,
    )
