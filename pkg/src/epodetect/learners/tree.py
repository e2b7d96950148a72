"""Binary decision trees shared by the forest and boosting learners.

Two growers over the same node representation: a Gini-impurity classification
grower whose leaves hold positive-class probabilities, and a second-order
regression grower whose leaves hold additive margin contributions. Split
candidates are midpoints between consecutive distinct sorted feature values;
gain ties break toward the lower feature index, then the lower threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Leaf:
    value: float


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]


def tree_depth(node: Node) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def tree_predict(node: Node, x: np.ndarray) -> np.ndarray:
    """Evaluate the tree on every row of x, routing index blocks down splits."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape[0], dtype=float)
    stack = [(node, np.arange(x.shape[0]))]
    while stack:
        current, idx = stack.pop()
        if idx.size == 0:
            continue
        if isinstance(current, Leaf):
            out[idx] = current.value
            continue
        goes_left = x[idx, current.feature] <= current.threshold
        stack.append((current.left, idx[goes_left]))
        stack.append((current.right, idx[~goes_left]))
    return out


def node_to_dict(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": node_to_dict(node.left),
        "right": node_to_dict(node.right),
    }


def node_from_dict(data: dict) -> Node:
    if "leaf" in data:
        return Leaf(float(data["leaf"]))
    return Split(
        feature=int(data["feature"]),
        threshold=float(data["threshold"]),
        left=node_from_dict(data["left"]),
        right=node_from_dict(data["right"]),
    )


def _split_positions(col_sorted: np.ndarray, min_leaf: int) -> np.ndarray:
    """Indices i such that splitting between i and i+1 is admissible."""
    n = col_sorted.size
    positions = np.nonzero(col_sorted[1:] > col_sorted[:-1])[0]
    if min_leaf > 1:
        positions = positions[(positions + 1 >= min_leaf) & (n - positions - 1 >= min_leaf)]
    return positions


def _midpoints(col_sorted: np.ndarray, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mid = 0.5 * (col_sorted[positions] + col_sorted[positions + 1])
    # Float rounding can collapse a midpoint onto one endpoint; such a
    # candidate cannot separate the two values and is skipped.
    usable = (mid > col_sorted[positions]) & (mid < col_sorted[positions + 1])
    return mid[usable], positions[usable]


def grow_classification_tree(
    x: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray,
    rng: np.random.Generator,
    max_depth: int,
    min_leaf: int,
    features_per_split: int,
) -> Node:
    """CART tree on weighted Gini impurity; leaves hold P(class 1)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    weights = np.asarray(weights, dtype=float)
    n_features = x.shape[1]

    def build(idx: np.ndarray, depth: int) -> Node:
        w = weights[idx]
        total = float(np.sum(w))
        pos = float(np.sum(w[y[idx] == 1]))
        prob = pos / total
        if pos == 0.0 or pos == total or depth >= max_depth or idx.size < 2 * min_leaf:
            return Leaf(prob)
        if features_per_split < n_features:
            feats = np.sort(rng.choice(n_features, size=features_per_split, replace=False))
        else:
            feats = np.arange(n_features)
        base_cost = pos * (total - pos) / total
        best_gain = 0.0
        best: tuple[int, float, np.ndarray] | None = None
        for feature in feats:
            order = np.argsort(x[idx, feature], kind="stable")
            col = x[idx[order], feature]
            positions = _split_positions(col, min_leaf)
            if positions.size == 0:
                continue
            thresholds, positions = _midpoints(col, positions)
            if positions.size == 0:
                continue
            cw = np.cumsum(w[order])
            cp = np.cumsum(w[order] * (y[idx[order]] == 1))
            wl = cw[positions]
            pl = cp[positions]
            wr = total - wl
            pr = pos - pl
            cost = pl * (wl - pl) / wl + pr * (wr - pr) / wr
            gains = base_cost - cost
            k = int(np.argmax(gains))
            if gains[k] > best_gain:
                best_gain = float(gains[k])
                left_mask = x[idx, feature] <= thresholds[k]
                best = (int(feature), float(thresholds[k]), left_mask)
        if best is None:
            return Leaf(prob)
        feature, threshold, left_mask = best
        return Split(
            feature=feature,
            threshold=threshold,
            left=build(idx[left_mask], depth + 1),
            right=build(idx[~left_mask], depth + 1),
        )

    return build(np.arange(x.shape[0]), 0)


def grow_regression_tree(
    x: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    lambda_: float,
    gamma_: float,
    max_depth: int,
    min_leaf: int,
) -> Node:
    """Second-order tree: leaf weight -G/(H+lambda), split gain
    0.5*(GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)) - gamma. Splits with
    non-positive gain are not taken.
    """
    x = np.asarray(x, dtype=float)
    grad = np.asarray(grad, dtype=float)
    hess = np.asarray(hess, dtype=float)
    n_features = x.shape[1]

    def leaf_value(g_sum: float, h_sum: float) -> float:
        denom = h_sum + lambda_
        return -g_sum / denom if denom > 0.0 else 0.0

    def score(g_sum, h_sum):
        denom = h_sum + lambda_
        return np.where(denom > 0.0, g_sum * g_sum / np.maximum(denom, 1e-300), 0.0)

    def build(idx: np.ndarray, depth: int) -> Node:
        g_total = float(np.sum(grad[idx]))
        h_total = float(np.sum(hess[idx]))
        if depth >= max_depth or idx.size < 2 * min_leaf:
            return Leaf(leaf_value(g_total, h_total))
        parent_score = float(score(g_total, h_total))
        best_gain = 0.0
        best: tuple[int, float, np.ndarray] | None = None
        for feature in range(n_features):
            order = np.argsort(x[idx, feature], kind="stable")
            col = x[idx[order], feature]
            positions = _split_positions(col, min_leaf)
            if positions.size == 0:
                continue
            thresholds, positions = _midpoints(col, positions)
            if positions.size == 0:
                continue
            cg = np.cumsum(grad[idx[order]])
            ch = np.cumsum(hess[idx[order]])
            gl = cg[positions]
            hl = ch[positions]
            gains = 0.5 * (score(gl, hl) + score(g_total - gl, h_total - hl) - parent_score) - gamma_
            k = int(np.argmax(gains))
            if gains[k] > best_gain and gains[k] > 0.0:
                best_gain = float(gains[k])
                left_mask = x[idx, feature] <= thresholds[k]
                best = (int(feature), float(thresholds[k]), left_mask)
        if best is None:
            return Leaf(leaf_value(g_total, h_total))
        feature, threshold, left_mask = best
        return Split(
            feature=feature,
            threshold=threshold,
            left=build(idx[left_mask], depth + 1),
            right=build(idx[~left_mask], depth + 1),
        )

    return build(np.arange(x.shape[0]), 0)
