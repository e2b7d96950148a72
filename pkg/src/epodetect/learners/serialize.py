"""Versioned JSON serialization for fitted models.

A loaded model reproduces the original scores exactly: floats pass through
json in full repr precision.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .boosting import BoostedModel
from .forest import ForestModel
from .kernels import KernelSpec
from .svm import SvcModel
from .tree import node_from_dict, node_to_dict

MODEL_FORMAT_VERSION = 1


def model_to_dict(model) -> dict:
    if isinstance(model, SvcModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "svc",
            "kernel": {
                "kind": model.kernel.kind,
                "gamma": model.kernel.gamma,
                "degree": model.kernel.degree,
                "coef0": model.kernel.coef0,
            },
            "c": model.c,
            "bias": model.bias,
            "support_vectors": model.support_vectors.tolist(),
            "dual_coefs": model.dual_coefs.tolist(),
            "converged": model.converged,
            "n_iter": model.n_iter,
            "n_features": model.n_features,
        }
    if isinstance(model, ForestModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "forest",
            "n_trees": model.n_trees,
            "max_depth": model.max_depth,
            "min_leaf": model.min_leaf,
            "feature_subsample": model.feature_subsample,
            "pos_weight": model.pos_weight,
            "seed": model.seed,
            "n_features": model.n_features,
            "trees": [node_to_dict(tree) for tree in model.trees],
        }
    if isinstance(model, BoostedModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "boosted",
            "learning_rate": model.learning_rate,
            "base_margin": model.base_margin,
            "lambda": model.lambda_,
            "gamma": model.gamma_,
            "n_rounds": model.n_rounds,
            "max_depth": model.max_depth,
            "min_leaf": model.min_leaf,
            "pos_weight": model.pos_weight,
            "n_features": model.n_features,
            "trees": [node_to_dict(tree) for tree in model.trees],
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(data: dict):
    version = data.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    kind = data.get("kind")
    if kind == "svc":
        kernel = KernelSpec(
            kind=data["kernel"]["kind"],
            gamma=data["kernel"]["gamma"],
            degree=data["kernel"]["degree"],
            coef0=data["kernel"]["coef0"],
        )
        support = np.asarray(data["support_vectors"], dtype=float)
        if support.size == 0:
            support = support.reshape(0, data["n_features"])
        return SvcModel(
            support_vectors=support,
            dual_coefs=np.asarray(data["dual_coefs"], dtype=float),
            bias=float(data["bias"]),
            kernel=kernel,
            c=float(data["c"]),
            converged=bool(data["converged"]),
            n_iter=int(data["n_iter"]),
        )
    if kind == "forest":
        return ForestModel(
            trees=tuple(node_from_dict(t) for t in data["trees"]),
            n_trees=int(data["n_trees"]),
            max_depth=int(data["max_depth"]),
            min_leaf=int(data["min_leaf"]),
            feature_subsample=data["feature_subsample"],
            pos_weight=float(data["pos_weight"]),
            seed=int(data["seed"]),
            n_features=int(data["n_features"]),
        )
    if kind == "boosted":
        return BoostedModel(
            trees=tuple(node_from_dict(t) for t in data["trees"]),
            learning_rate=float(data["learning_rate"]),
            base_margin=float(data["base_margin"]),
            lambda_=float(data["lambda"]),
            gamma_=float(data["gamma"]),
            n_rounds=int(data["n_rounds"]),
            max_depth=int(data["max_depth"]),
            min_leaf=int(data["min_leaf"]),
            pos_weight=float(data["pos_weight"]),
            n_features=int(data["n_features"]),
        )
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
