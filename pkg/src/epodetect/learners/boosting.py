"""Second-order gradient boosting of regression trees on logistic loss.

Each round fits one tree to the per-sample gradient and curvature of the
log-loss at the current margins; leaf weights are the exact minimizers
-G/(H+lambda) of the per-leaf quadratic objective, and tree outputs are
scaled by the learning rate. Boosting is sequential and fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import FeatureMatrix
from .tree import Node, grow_regression_tree, tree_predict


def sigmoid(margin):
    m = np.asarray(margin, dtype=float)
    scalar = m.ndim == 0
    m = np.atleast_1d(m)
    out = np.empty_like(m)
    pos = m >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-m[pos]))
    e = np.exp(m[~pos])
    out[~pos] = e / (1.0 + e)
    return float(out[0]) if scalar else out


def logistic_grad_hess(label, margin):
    """Gradient and curvature of the log-loss at the given margin.

    g = p - label and h = p*(1-p) with p = sigmoid(margin). Accepts scalars
    or arrays.
    """
    p = sigmoid(margin)
    g = p - np.asarray(label, dtype=float)
    h = p * (1.0 - p)
    if np.ndim(g) == 0:
        return float(g), float(h)
    return g, h


@dataclass(frozen=True)
class BoostedModel:
    trees: tuple[Node, ...]
    learning_rate: float
    base_margin: float
    lambda_: float
    gamma_: float
    n_rounds: int
    max_depth: int
    min_leaf: int
    pos_weight: float
    n_features: int

    decision_threshold = 0.5

    def margins(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        total = np.full(x.shape[0], self.base_margin)
        for tree in self.trees:
            total += self.learning_rate * tree_predict(tree, x)
        return total

    def probas(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.margins(x))

    scores = probas

    def predict_proba(self, x) -> float:
        return float(self.probas(np.atleast_2d(x))[0])

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.probas(x) > self.decision_threshold).astype(int)


def fit_boosted(
    data: FeatureMatrix,
    n_rounds: int = 200,
    learning_rate: float = 0.1,
    lambda_: float = 1.0,
    gamma_: float = 0.0,
    max_depth: int = 4,
    min_leaf: int = 1,
    pos_weight: float = 1.0,
    seed: int = 0,
) -> BoostedModel:
    """Fit the boosted ensemble.

    The base margin is the log-odds of the (weighted) positive-class prior.
    The fit is deterministic; seed is accepted only for signature parity with
    the other learners.
    """
    del seed
    if n_rounds < 0:
        raise ValueError("n_rounds must be non-negative")
    if not 0.0 < learning_rate <= 1.0:
        raise ValueError(f"learning_rate must be in (0, 1], got {learning_rate}")
    if lambda_ < 0 or gamma_ < 0:
        raise ValueError("lambda_ and gamma_ must be non-negative")
    if pos_weight <= 0:
        raise ValueError("pos_weight must be positive")
    n_pos = int(np.sum(data.y == 1))
    n_neg = data.n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("training data contains a single class")

    weights = np.where(data.y == 1, pos_weight, 1.0)
    base_margin = math.log((pos_weight * n_pos) / n_neg)
    margins = np.full(data.n, base_margin)
    trees = []
    for _ in range(n_rounds):
        g, h = logistic_grad_hess(data.y, margins)
        tree = grow_regression_tree(
            data.x,
            g * weights,
            h * weights,
            lambda_=lambda_,
            gamma_=gamma_,
            max_depth=max_depth,
            min_leaf=min_leaf,
        )
        trees.append(tree)
        margins += learning_rate * tree_predict(tree, data.x)
    return BoostedModel(
        trees=tuple(trees),
        learning_rate=learning_rate,
        base_margin=base_margin,
        lambda_=lambda_,
        gamma_=gamma_,
        n_rounds=n_rounds,
        max_depth=max_depth,
        min_leaf=min_leaf,
        pos_weight=pos_weight,
        n_features=data.d,
    )
