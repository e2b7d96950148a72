import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epodetect import FeatureMatrix, fit_boosted, logistic_grad_hess
from epodetect.learners import model_to_dict, tree_predict
from epodetect.learners.boosting import BoostedModel, sigmoid
from epodetect.learners.tree import Leaf, tree_depth


def log_loss(y, p):
    p = np.clip(p, 1e-12, 1 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def oracle_sigmoid(m):
    if m >= 0:
        return 1.0 / (1.0 + math.exp(-m))
    return math.exp(m) / (1.0 + math.exp(m))


def fd_grad_hess(label, margin, step=1e-5):
    """Independent oracle: g as the central difference of the log-loss, h as
    the central difference of the textbook gradient sigmoid(m) - y. (A second
    difference of the loss at this step size drowns in cancellation noise.)"""

    def loss(m):
        p = oracle_sigmoid(m)
        return -(label * math.log(p) + (1 - label) * math.log(1 - p))

    g = (loss(margin + step) - loss(margin - step)) / (2 * step)
    h = (
        (oracle_sigmoid(margin + step) - label) - (oracle_sigmoid(margin - step) - label)
    ) / (2 * step)
    return g, h


def small_dataset(seed=0, n=40):
    rng = np.random.default_rng(seed)
    half = n // 2
    x = np.vstack([rng.normal(0.0, 1.0, (half, 3)), rng.normal(1.5, 1.0, (n - half, 3))])
    y = np.r_[np.zeros(half, dtype=int), np.ones(n - half, dtype=int)]
    return FeatureMatrix(x, y, ("f0", "f1", "f2"))


class TestLogisticGradHess:
    def test_positive_label_at_zero_margin(self):
        assert logistic_grad_hess(1, 0.0) == (-0.5, 0.25)

    def test_negative_label_at_zero_margin(self):
        assert logistic_grad_hess(0, 0.0) == (0.5, 0.25)

    def test_matches_finite_differences_at_example_margin(self):
        for label in (0, 1):
            g, h = logistic_grad_hess(label, 0.7)
            g_fd, h_fd = fd_grad_hess(label, 0.7)
            assert g == pytest.approx(g_fd, rel=1e-6)
            assert h == pytest.approx(h_fd, rel=1e-6)

    @given(margin=st.floats(-8.0, 8.0), label=st.sampled_from([0, 1]))
    def test_matches_finite_differences_everywhere(self, margin, label):
        g, h = logistic_grad_hess(label, margin)
        g_fd, h_fd = fd_grad_hess(label, margin)
        assert g == pytest.approx(g_fd, rel=1e-6, abs=1e-9)
        assert h == pytest.approx(h_fd, rel=1e-6, abs=1e-9)

    def test_array_form(self):
        g, h = logistic_grad_hess(np.array([0, 1]), np.array([0.0, 0.0]))
        assert np.array_equal(g, [0.5, -0.5])
        assert np.array_equal(h, [0.25, 0.25])


class TestFitBoosted:
    def test_zero_rounds_predicts_prior(self):
        data = small_dataset()
        prior = float(np.mean(data.y))
        model = fit_boosted(data, n_rounds=0)
        assert np.allclose(model.probas(data.x), prior, atol=1e-12)

    def test_huge_lambda_freezes_predictions_at_prior(self):
        data = small_dataset(1)
        prior = float(np.mean(data.y))
        model = fit_boosted(data, n_rounds=10, lambda_=1e12)
        assert np.allclose(model.probas(data.x), prior, atol=1e-6)

    def test_huge_gamma_blocks_all_splits(self):
        data = small_dataset(2)
        model = fit_boosted(data, n_rounds=5, gamma_=1e9)
        assert all(tree_depth(tree) == 0 for tree in model.trees)

    def test_training_log_loss_non_increasing(self):
        data = small_dataset(3)
        model = fit_boosted(data, n_rounds=50, learning_rate=0.2)
        margins = np.full(data.n, model.base_margin)
        losses = [log_loss(data.y, sigmoid(margins))]
        for tree in model.trees:
            margins = margins + model.learning_rate * tree_predict(tree, data.x)
            losses.append(log_loss(data.y, sigmoid(margins)))
        assert all(later <= earlier + 1e-12 for earlier, later in zip(losses, losses[1:]))
        assert losses[-1] < losses[0]

    @given(
        g_sum=st.floats(-50.0, 50.0),
        h_sum=st.floats(0.0, 50.0),
        lam=st.floats(0.01, 10.0),
    )
    def test_leaf_weight_minimizes_quadratic_objective(self, g_sum, h_sum, lam):
        weight = -g_sum / (h_sum + lam)

        def objective(w):
            return g_sum * w + 0.5 * (h_sum + lam) * w * w

        grid = weight + np.linspace(-1.0, 1.0, 2001)
        assert objective(weight) <= float(np.min(objective(grid))) + 1e-9

    def test_deterministic(self):
        data = small_dataset(4)
        a = fit_boosted(data, n_rounds=20)
        b = fit_boosted(data, n_rounds=20)
        assert model_to_dict(a) == model_to_dict(b)

    def test_single_class_rejected(self):
        data = FeatureMatrix(np.eye(3), np.array([1, 1, 1]), ("a", "b", "c"))
        with pytest.raises(ValueError, match="single class"):
            fit_boosted(data)

    def test_depth_limit_respected(self):
        data = small_dataset(5)
        model = fit_boosted(data, n_rounds=10, max_depth=2)
        assert max(tree_depth(tree) for tree in model.trees) <= 2

    @pytest.mark.parametrize("bad", [{"learning_rate": 0.0}, {"learning_rate": 1.5},
                                     {"lambda_": -1.0}, {"gamma_": -0.1}])
    def test_parameter_domains(self, bad):
        with pytest.raises(ValueError):
            fit_boosted(small_dataset(), **bad)


class TestBoostedPrediction:
    def test_empty_tree_list_gives_prior(self):
        model = BoostedModel(
            trees=(), learning_rate=0.1, base_margin=math.log(0.25 / 0.75),
            lambda_=1.0, gamma_=0.0, n_rounds=0, max_depth=4, min_leaf=1,
            pos_weight=1.0, n_features=2,
        )
        assert model.predict_proba(np.zeros(2)) == pytest.approx(0.25)

    @given(margin=st.floats(-30.0, 30.0))
    def test_output_strictly_inside_unit_interval(self, margin):
        assert 0.0 < sigmoid(margin) < 1.0

    def test_zero_tree_changes_nothing(self):
        data = small_dataset(6)
        model = fit_boosted(data, n_rounds=5)
        padded = BoostedModel(
            trees=model.trees + (Leaf(0.0),),
            learning_rate=model.learning_rate,
            base_margin=model.base_margin,
            lambda_=model.lambda_,
            gamma_=model.gamma_,
            n_rounds=model.n_rounds + 1,
            max_depth=model.max_depth,
            min_leaf=model.min_leaf,
            pos_weight=model.pos_weight,
            n_features=model.n_features,
        )
        assert np.array_equal(model.probas(data.x), padded.probas(data.x))

    def test_dimension_checked(self):
        model = fit_boosted(small_dataset(7), n_rounds=2)
        with pytest.raises(ValueError, match="features"):
            model.probas(np.zeros((2, 5)))
