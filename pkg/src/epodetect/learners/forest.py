"""Bagged forest of Gini decision trees with soft probability voting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import FeatureMatrix
from .tree import Node, grow_classification_tree, tree_predict


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[Node, ...]
    n_trees: int
    max_depth: int
    min_leaf: int
    feature_subsample: float | None
    pos_weight: float
    seed: int
    n_features: int

    decision_threshold = 0.5

    def probas(self, x: np.ndarray) -> np.ndarray:
        """Mean of per-tree leaf probabilities (soft voting)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        votes = np.zeros(x.shape[0])
        for tree in self.trees:
            votes += tree_predict(tree, x)
        return votes / len(self.trees)

    scores = probas

    def predict_proba(self, x) -> float:
        return float(self.probas(np.atleast_2d(x))[0])

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.probas(x) > self.decision_threshold).astype(int)


def features_per_split(d: int, feature_subsample: float | None) -> int:
    """Resolve the per-split feature count: ceil(sqrt(d)) unless a fraction is given."""
    if feature_subsample is None:
        return min(d, math.ceil(math.sqrt(d)))
    if not 0.0 < feature_subsample <= 1.0:
        raise ValueError(f"feature_subsample must be in (0, 1], got {feature_subsample}")
    return min(d, max(1, math.ceil(feature_subsample * d)))


def fit_forest(
    data: FeatureMatrix,
    n_trees: int = 100,
    max_depth: int = 8,
    min_leaf: int = 1,
    feature_subsample: float | None = None,
    pos_weight: float = 1.0,
    seed: int = 0,
) -> ForestModel:
    """Grow n_trees CART trees, each on a size-n bootstrap resample.

    Tree t draws its bootstrap and per-split feature subsets from the RNG
    substream (seed, t), so fits are bit-identical for identical inputs.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be positive")
    if data.n < 2:
        raise ValueError("forest fitting needs at least two samples")
    if pos_weight <= 0:
        raise ValueError("pos_weight must be positive")
    k = features_per_split(data.d, feature_subsample)
    weights = np.where(data.y == 1, pos_weight, 1.0)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng((seed, t))
        boot = rng.integers(0, data.n, size=data.n)
        trees.append(
            grow_classification_tree(
                data.x[boot],
                data.y[boot],
                weights[boot],
                rng,
                max_depth=max_depth,
                min_leaf=min_leaf,
                features_per_split=k,
            )
        )
    return ForestModel(
        trees=tuple(trees),
        n_trees=n_trees,
        max_depth=max_depth,
        min_leaf=min_leaf,
        feature_subsample=feature_subsample,
        pos_weight=pos_weight,
        seed=seed,
        n_features=data.d,
    )
