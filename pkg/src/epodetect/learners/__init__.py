"""Binary classifiers over selected blood-parameter features.

Three learners share one scoring contract: `scores(X)` returns the ROC-ready
score per row (a signed decision value for the SVC, a positive-class
probability for the forest and the boosted ensemble), and
`decision_threshold` is the default operating point for hard labels.
"""

from __future__ import annotations

from .base import FeatureMatrix
from .boosting import BoostedModel, fit_boosted, logistic_grad_hess, sigmoid
from .forest import ForestModel, fit_forest
from .kernels import KernelSpec, kernel_eval, kernel_matrix
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .svm import SvcModel, fit_svc
from .tree import Leaf, Node, Split, tree_depth, tree_predict

MODEL_KINDS = ("svc", "rf", "boost")

_SVC_KEYS = {"c", "kernel", "gamma", "degree", "coef0", "tol", "max_iter"}
_RF_KEYS = {"n_trees", "max_depth", "min_leaf", "feature_subsample", "pos_weight"}
_BOOST_KEYS = {
    "n_rounds",
    "learning_rate",
    "lambda_",
    "gamma_",
    "max_depth",
    "min_leaf",
    "pos_weight",
}


def _kernel_from_params(params: dict) -> KernelSpec:
    kind = params.get("kernel", "linear")
    if isinstance(kind, KernelSpec):
        return kind
    if kind == "linear":
        return KernelSpec.linear()
    if kind == "rbf":
        return KernelSpec.rbf(params.get("gamma", 1.0))
    if kind == "poly":
        return KernelSpec.polynomial(params.get("degree", 3), params.get("coef0", 0.0))
    raise ValueError(f"unknown kernel {kind!r}")


def fit_model(kind: str, data: FeatureMatrix, params: dict | None = None, seed: int = 0):
    """Fit one of the three learners by kind name with a flat parameter dict."""
    params = dict(params or {})
    if kind == "svc":
        unknown = set(params) - _SVC_KEYS
        if unknown:
            raise ValueError(f"unknown svc parameters {sorted(unknown)}")
        return fit_svc(
            data,
            c=params.get("c", 1.0),
            kernel=_kernel_from_params(params),
            tol=params.get("tol", 1e-3),
            max_iter=params.get("max_iter", 20_000),
        )
    if kind == "rf":
        unknown = set(params) - _RF_KEYS
        if unknown:
            raise ValueError(f"unknown rf parameters {sorted(unknown)}")
        return fit_forest(data, seed=seed, **params)
    if kind == "boost":
        unknown = set(params) - _BOOST_KEYS
        if unknown:
            raise ValueError(f"unknown boost parameters {sorted(unknown)}")
        return fit_boosted(data, seed=seed, **params)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


__all__ = [
    "BoostedModel",
    "FeatureMatrix",
    "ForestModel",
    "KernelSpec",
    "Leaf",
    "MODEL_KINDS",
    "Node",
    "Split",
    "SvcModel",
    "fit_boosted",
    "fit_forest",
    "fit_model",
    "fit_svc",
    "kernel_eval",
    "kernel_matrix",
    "load_model",
    "logistic_grad_hess",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "sigmoid",
    "tree_depth",
    "tree_predict",
]
