"""Random hyperparameter search with median pruning.

Trials sample independently from a declared space using per-trial RNG
substreams, so results do not depend on execution order. With pruning on, a
trial stops after fold j when its running mean falls below the median of the
running means that completed trials had at fold j; the first trial therefore
always runs to completion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import median
from typing import Callable, Iterable, Mapping

import numpy as np

from .evaluation import LearnerSpec, Normalizer, kfold, roc_curve
from .learners import FeatureMatrix, fit_model


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def sample(self, rng: np.random.Generator):
        return float(rng.uniform(self.lo, self.hi))


@dataclass(frozen=True)
class LogUniform:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not 0.0 < self.lo <= self.hi:
            raise ValueError(f"log-uniform needs 0 < lo <= hi, got [{self.lo}, {self.hi}]")

    def sample(self, rng: np.random.Generator):
        return float(math.exp(rng.uniform(math.log(self.lo), math.log(self.hi))))


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int  # inclusive

    def sample(self, rng: np.random.Generator):
        return int(rng.integers(self.lo, self.hi + 1))


@dataclass(frozen=True)
class Choice:
    options: tuple

    def sample(self, rng: np.random.Generator):
        return self.options[int(rng.integers(len(self.options)))]


SearchSpace = Mapping[str, Uniform | LogUniform | IntRange | Choice]


def sample_params(space: SearchSpace, rng: np.random.Generator) -> dict:
    return {name: axis.sample(rng) for name, axis in space.items()}


@dataclass
class TrialRecord:
    index: int
    params: dict
    fold_scores: list[float] = field(default_factory=list)
    pruned: bool = False

    @property
    def mean_score(self) -> float | None:
        if not self.fold_scores:
            return None
        return float(np.mean(self.fold_scores))

    def running_mean(self, upto: int) -> float:
        return float(np.mean(self.fold_scores[: upto + 1]))

    @property
    def completed(self) -> bool:
        return not self.pruned and bool(self.fold_scores)


@dataclass
class SearchResult:
    best: TrialRecord | None
    trials: list[TrialRecord]
    no_completed_trials: bool


def hpo_search(
    space: SearchSpace,
    objective: Callable[[dict], Iterable[float]],
    n_trials: int,
    pruning: bool = True,
    seed: int = 0,
) -> SearchResult:
    """Maximize the mean of the objective's per-fold scores over random draws.

    `objective(params)` yields one score per fold; yielding lazily lets
    pruning stop a doomed trial early. Returns the completed trial with the
    best mean score; if nothing completed, the best partial trial is returned
    with the warning flag set.
    """
    if not space:
        raise ValueError("search space is empty")
    if n_trials < 1:
        raise ValueError("n_trials must be positive")
    trials: list[TrialRecord] = []
    completed: list[TrialRecord] = []
    for index in range(n_trials):
        rng = np.random.default_rng((seed, index))
        trial = TrialRecord(index=index, params=sample_params(space, rng))
        for j, score in enumerate(objective(trial.params)):
            trial.fold_scores.append(float(score))
            if pruning:
                peers = [t.running_mean(j) for t in completed if len(t.fold_scores) > j]
                if peers and trial.running_mean(j) < median(peers):
                    trial.pruned = True
                    break
        if trial.completed:
            completed.append(trial)
        trials.append(trial)

    if completed:
        best = completed[0]
        for trial in completed[1:]:
            if trial.mean_score > best.mean_score:  # ties keep the earliest trial
                best = trial
        return SearchResult(best=best, trials=trials, no_completed_trials=False)

    best = None
    for trial in trials:
        if trial.mean_score is not None and (
            best is None or trial.mean_score > best.mean_score
        ):
            best = trial
    return SearchResult(best=best, trials=trials, no_completed_trials=True)


def cv_auc_objective(
    data: FeatureMatrix,
    kind: str,
    k: int = 5,
    seed: int = 0,
    fixed_params: dict | None = None,
) -> Callable[[dict], Iterable[float]]:
    """Objective factory: per-fold held-out AUC under the usual protocol.

    Folds are assigned once so every trial sees the same partition.
    """
    assignment = kfold(data, k, seed=seed, stratified=True)
    fixed = dict(fixed_params or {})

    def objective(params: dict):
        merged = {**fixed, **params}
        for fold, (train_idx, test_idx) in enumerate(assignment):
            train = data.take(train_idx)
            test = data.take(test_idx)
            normalizer = Normalizer.fit(train.x)
            model = fit_model(
                kind,
                normalizer.transform_data(train),
                merged,
                seed=int(np.random.SeedSequence((seed, fold)).generate_state(1)[0]),
            )
            scores = model.scores(normalizer.transform(test.x))
            yield roc_curve(test.y, scores).auc

    return objective


def default_search_space(kind: str) -> dict:
    """Reasonable search axes per model kind for the command-line interface."""
    if kind == "svc":
        return {
            "c": LogUniform(0.01, 100.0),
            "kernel": Choice(("linear", "rbf")),
            "gamma": LogUniform(0.01, 10.0),
        }
    if kind == "rf":
        return {
            "n_trees": IntRange(20, 200),
            "max_depth": IntRange(2, 10),
            "min_leaf": IntRange(1, 5),
        }
    if kind == "boost":
        return {
            "n_rounds": IntRange(50, 300),
            "learning_rate": LogUniform(0.03, 0.3),
            "max_depth": IntRange(2, 6),
            "lambda_": LogUniform(0.1, 10.0),
        }
    raise ValueError(f"unknown model kind {kind!r}")


def spec_from_trial(kind: str, trial: TrialRecord) -> LearnerSpec:
    return LearnerSpec(kind=kind, params=dict(trial.params))
