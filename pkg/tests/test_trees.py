import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epodetect import FeatureMatrix, fit_forest
from epodetect.learners import model_to_dict
from epodetect.learners.forest import ForestModel, features_per_split
from epodetect.learners.tree import (
    Leaf,
    Split,
    grow_classification_tree,
    tree_depth,
    tree_predict,
)


def gini_split_oracle(x, y):
    """All (feature, midpoint) candidates scanned directly; ties keep the
    lower feature index, then the lower threshold."""
    n, d = x.shape
    pos_total = float(np.sum(y == 1))
    total = float(n)
    base = pos_total * (total - pos_total) / total
    best = None
    best_gain = 0.0
    for feature in range(d):
        values = np.unique(x[:, feature])
        for lo, hi in zip(values, values[1:]):
            threshold = 0.5 * (lo + hi)
            if not lo < threshold < hi:
                continue
            left = x[:, feature] <= threshold
            wl, pl = float(np.sum(left)), float(np.sum(y[left] == 1))
            wr, pr = total - wl, pos_total - pl
            gain = base - (pl * (wl - pl) / wl + pr * (wr - pr) / wr)
            if gain > best_gain:
                best_gain = gain
                best = (feature, threshold)
    return best


def leaf_sizes(node, x):
    """Number of training rows routed into each leaf."""
    sizes = []
    stack = [(node, np.arange(x.shape[0]))]
    while stack:
        current, idx = stack.pop()
        if isinstance(current, Leaf):
            sizes.append(idx.size)
            continue
        left = x[idx, current.feature] <= current.threshold
        stack.append((current.left, idx[left]))
        stack.append((current.right, idx[~left]))
    return sizes


class TestClassificationTree:
    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_root_split_matches_brute_force_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 31))
        d = int(rng.integers(1, 4))
        x = rng.integers(0, 6, size=(n, d)).astype(float)  # ties on purpose
        y = rng.integers(0, 2, size=n)
        tree = grow_classification_tree(
            x, y, np.ones(n), np.random.default_rng(0),
            max_depth=1, min_leaf=1, features_per_split=d,
        )
        oracle = gini_split_oracle(x, y)
        if oracle is None:
            assert isinstance(tree, Leaf)
        else:
            assert isinstance(tree, Split)
            assert (tree.feature, tree.threshold) == oracle

    def test_one_dimensional_separation_needs_one_split(self):
        x = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
        y = np.array([0, 0, 0, 1, 1, 1])
        tree = grow_classification_tree(
            x, y, np.ones(6), np.random.default_rng(0),
            max_depth=8, min_leaf=1, features_per_split=1,
        )
        assert tree_depth(tree) == 1
        assert np.array_equal(tree_predict(tree, x), y.astype(float))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 5000), max_depth=st.integers(1, 6), min_leaf=st.integers(1, 4))
    def test_depth_and_leaf_size_limits(self, seed, max_depth, min_leaf):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(40, 3))
        y = rng.integers(0, 2, size=40)
        tree = grow_classification_tree(
            x, y, np.ones(40), np.random.default_rng(seed),
            max_depth=max_depth, min_leaf=min_leaf, features_per_split=3,
        )
        assert tree_depth(tree) <= max_depth
        assert min(leaf_sizes(tree, x)) >= min_leaf

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 5000))
    def test_batch_predict_matches_row_walk(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(30, 2))
        y = rng.integers(0, 2, size=30)
        tree = grow_classification_tree(
            x, y, np.ones(30), np.random.default_rng(1),
            max_depth=4, min_leaf=1, features_per_split=2,
        )

        def walk(node, row):
            while isinstance(node, Split):
                node = node.left if row[node.feature] <= node.threshold else node.right
            return node.value

        got = tree_predict(tree, x)
        assert all(got[i] == walk(tree, x[i]) for i in range(30))


class TestForest:
    def test_pure_class_gives_unit_leaves(self):
        data = FeatureMatrix(np.random.default_rng(0).normal(size=(10, 2)),
                             np.ones(10, dtype=int), ("a", "b"))
        model = fit_forest(data, n_trees=5, seed=0)
        assert all(isinstance(tree, Leaf) and tree.value == 1.0 for tree in model.trees)
        assert model.predict_proba(np.zeros(2)) == 1.0

    def test_same_seed_bit_identical(self):
        rng = np.random.default_rng(3)
        data = FeatureMatrix(rng.normal(size=(30, 3)), rng.integers(0, 2, 30), ("a", "b", "c"))
        a = fit_forest(data, n_trees=10, seed=7)
        b = fit_forest(data, n_trees=10, seed=7)
        assert model_to_dict(a) == model_to_dict(b)

    def test_different_seed_differs(self):
        rng = np.random.default_rng(3)
        data = FeatureMatrix(rng.normal(size=(30, 3)), rng.integers(0, 2, 30), ("a", "b", "c"))
        a = fit_forest(data, n_trees=10, seed=7)
        b = fit_forest(data, n_trees=10, seed=8)
        assert model_to_dict(a) != model_to_dict(b)

    def test_soft_vote_is_mean_of_leaves(self):
        hard = ForestModel(
            trees=(Leaf(1.0), Leaf(0.0), Leaf(1.0), Leaf(0.0)),
            n_trees=4, max_depth=1, min_leaf=1, feature_subsample=None,
            pos_weight=1.0, seed=0, n_features=2,
        )
        assert hard.predict_proba(np.zeros(2)) == 0.5
        unanimous = ForestModel(
            trees=(Leaf(1.0), Leaf(1.0)),
            n_trees=2, max_depth=1, min_leaf=1, feature_subsample=None,
            pos_weight=1.0, seed=0, n_features=2,
        )
        assert unanimous.predict_proba(np.zeros(2)) == 1.0

    def test_removing_one_hard_tree_moves_vote_by_at_most_its_share(self):
        trees = tuple(Leaf(float(v)) for v in (1, 0, 1, 1, 0))
        full = ForestModel(trees=trees, n_trees=5, max_depth=1, min_leaf=1,
                           feature_subsample=None, pos_weight=1.0, seed=0, n_features=1)
        x = np.zeros(1)
        for drop in range(5):
            reduced = ForestModel(
                trees=trees[:drop] + trees[drop + 1:], n_trees=4, max_depth=1,
                min_leaf=1, feature_subsample=None, pos_weight=1.0, seed=0, n_features=1,
            )
            assert abs(full.predict_proba(x) - reduced.predict_proba(x)) <= 1.0 / 4.0

    def test_feature_subsample_resolution(self):
        assert features_per_split(8, None) == 3  # ceil(sqrt(8))
        assert features_per_split(9, None) == 3
        assert features_per_split(8, 0.5) == 4
        assert features_per_split(8, 1.0) == 8
        with pytest.raises(ValueError):
            features_per_split(8, 0.0)

    def test_dimension_checked(self):
        data = FeatureMatrix(np.eye(4), np.array([0, 1, 0, 1]), ("a", "b", "c", "d"))
        model = fit_forest(data, n_trees=3, seed=0)
        with pytest.raises(ValueError, match="features"):
            model.probas(np.zeros((2, 3)))

    def test_needs_two_samples(self):
        data = FeatureMatrix(np.ones((1, 2)), np.array([1]), ("a", "b"))
        with pytest.raises(ValueError):
            fit_forest(data)

    def test_probas_within_unit_interval(self, sea_cohort):
        data = FeatureMatrix.from_cohort(sea_cohort, ("RET%", "IRF", "OFF-HR"))
        model = fit_forest(data, n_trees=20, max_depth=4, seed=1)
        probas = model.probas(data.x)
        assert np.all((probas >= 0.0) & (probas <= 1.0))
