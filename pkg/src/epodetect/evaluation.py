"""Training protocol and metrics: splits, cross-validation, normalization,
confusion-matrix metrics and the ROC curve.

Normalization statistics are always fitted on training rows only; held-out
rows never leak into fitting. All randomized operations are reproducible
from an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .learners import FeatureMatrix, fit_model

# Prior-art reference operating point used as the comparison row in reports.
SOTA_BASELINE = {"sensitivity": 0.45, "specificity": 1.0, "auc": 0.84}


@dataclass(frozen=True)
class FoldAssignment:
    """A disjoint, exhaustive assignment of samples to k folds."""

    fold_index: np.ndarray
    k: int
    seed: int
    stratified: bool

    def __post_init__(self) -> None:
        idx = np.asarray(self.fold_index, dtype=int)
        object.__setattr__(self, "fold_index", idx)
        if idx.size == 0 or self.k < 2:
            raise ValueError("fold assignment needs k >= 2 and at least one sample")
        counts = np.bincount(idx, minlength=self.k)
        if np.any(counts == 0):
            raise ValueError("every fold must be non-empty")

    def split(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        test = np.nonzero(self.fold_index == fold)[0]
        train = np.nonzero(self.fold_index != fold)[0]
        return train, test

    def __iter__(self):
        return (self.split(fold) for fold in range(self.k))


def _dealt_folds(labels: np.ndarray, k: int, rng: np.random.Generator, stratified: bool) -> np.ndarray:
    n = labels.shape[0]
    fold = np.empty(n, dtype=int)
    if stratified:
        # Deal each class round-robin, carrying the fold pointer across
        # classes: fold sizes stay within one of n/k and per-fold class
        # counts within one of n_class/k.
        pointer = 0
        for cls in np.unique(labels):
            idx = np.nonzero(labels == cls)[0]
            idx = rng.permutation(idx)
            for i in idx:
                fold[i] = pointer % k
                pointer += 1
    else:
        order = rng.permutation(n)
        sizes = np.full(k, n // k)
        sizes[: n % k] += 1
        start = 0
        for f, size in enumerate(sizes):
            fold[order[start : start + size]] = f
            start += size
    return fold


def kfold(data: FeatureMatrix, k: int, seed: int = 0, stratified: bool = True) -> FoldAssignment:
    """Partition into k folds of size floor(n/k) or ceil(n/k)."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > data.n:
        raise ValueError(f"k={k} exceeds the {data.n} available samples")
    rng = np.random.default_rng(seed)
    fold = _dealt_folds(data.y, k, rng, stratified)
    return FoldAssignment(fold_index=fold, k=k, seed=seed, stratified=stratified)


def train_test_split(
    data: FeatureMatrix, fraction: float, seed: int = 0, stratified: bool = True
) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Random train/test partition with the given training fraction."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    if stratified:
        for cls in np.unique(data.y):
            idx = rng.permutation(np.nonzero(data.y == cls)[0])
            n_train = int(round(fraction * idx.size))
            train_idx.extend(idx[:n_train])
            test_idx.extend(idx[n_train:])
    else:
        idx = rng.permutation(data.n)
        n_train = int(round(fraction * data.n))
        train_idx.extend(idx[:n_train])
        test_idx.extend(idx[n_train:])
    if not train_idx or not test_idx:
        raise ValueError(f"fraction {fraction} yields an empty train or test side")
    return data.take(np.sort(train_idx)), data.take(np.sort(test_idx))


@dataclass(frozen=True)
class Normalizer:
    """Per-feature standardization fitted on training rows only."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Normalizer":
        x = np.asarray(x, dtype=float)
        mean = np.mean(x, axis=0)
        std = np.std(x, axis=0)
        scale = np.where(std > 0.0, std, 1.0)
        return cls(mean=mean, scale=scale)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.scale

    def transform_data(self, data: FeatureMatrix) -> FeatureMatrix:
        return FeatureMatrix(self.transform(data.x), data.y, data.feature_names)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_scores(cls, labels, scores, threshold: float) -> "ConfusionMatrix":
        labels = np.asarray(labels, dtype=int)
        predicted = np.asarray(scores, dtype=float) > threshold
        return cls(
            tp=int(np.sum(predicted & (labels == 1))),
            fp=int(np.sum(predicted & (labels == 0))),
            fn=int(np.sum(~predicted & (labels == 1))),
            tn=int(np.sum(~predicted & (labels == 0))),
        )


@dataclass(frozen=True)
class MetricsReport:
    """Confusion-derived metrics; ratios with a zero denominator are None."""

    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None
    sensitivity: float | None
    specificity: float | None


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else None
    specificity = cm.tn / (cm.tn + cm.fp) if cm.tn + cm.fp > 0 else None
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp > 0 else None
    if precision is None or recall is None:
        f1 = None
    elif precision + recall == 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return MetricsReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        sensitivity=recall,
        specificity=specificity,
    )


@dataclass(frozen=True)
class RocCurve:
    """Operating curve from (0,0) to (1,1) with one step per distinct score."""

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    def youden(self) -> tuple[float, float]:
        """Threshold maximizing tpr - fpr, with the achieved J statistic."""
        j = self.tpr[1:] - self.fpr[1:]
        best = int(np.argmax(j))
        return float(self.thresholds[best]), float(j[best])


def roc_curve(labels, scores) -> RocCurve:
    """Sweep thresholds over distinct scores descending; tied scores form a
    single step. The area is computed by the trapezoidal rule."""
    labels = np.asarray(labels, dtype=int)
    scores = np.asarray(scores, dtype=float)
    if labels.shape != scores.shape:
        raise ValueError("labels and scores must have equal length")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes present")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    distinct_last = np.nonzero(np.r_[sorted_scores[1:] != sorted_scores[:-1], True])[0]
    cum_tp = np.r_[0, np.cumsum(sorted_labels == 1)[distinct_last]]
    cum_fp = np.r_[0, np.cumsum(sorted_labels == 0)[distinct_last]]
    # Trapezoid area accumulated in exact integer arithmetic, so the result
    # equals the normalized pairwise-comparison count bit for bit.
    numerator = int(np.sum((cum_fp[1:] - cum_fp[:-1]) * (cum_tp[1:] + cum_tp[:-1])))
    auc = numerator / (2 * n_pos * n_neg)
    return RocCurve(
        thresholds=sorted_scores[distinct_last],
        fpr=cum_fp / n_neg,
        tpr=cum_tp / n_pos,
        auc=auc,
    )


@dataclass(frozen=True)
class EvaluationResult:
    """One model evaluated on one held-out set."""

    confusion: ConfusionMatrix
    metrics: MetricsReport
    roc: RocCurve
    auc: float
    youden_threshold: float
    youden_j: float


def evaluate_scores(labels, scores, threshold: float) -> EvaluationResult:
    cm = ConfusionMatrix.from_scores(labels, scores, threshold)
    roc = roc_curve(labels, scores)
    youden_threshold, youden_j = roc.youden()
    return EvaluationResult(
        confusion=cm,
        metrics=metrics(cm),
        roc=roc,
        auc=roc.auc,
        youden_threshold=youden_threshold,
        youden_j=youden_j,
    )


@dataclass(frozen=True)
class LearnerSpec:
    """A model kind plus its hyperparameters, as consumed by fit_model."""

    kind: str
    params: dict = field(default_factory=dict)


def _fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence((seed, fold)).generate_state(1)[0])


@dataclass(frozen=True)
class FoldEvaluation:
    fold: int
    result: EvaluationResult
    normalizer: Normalizer
    n_train: int
    n_test: int


@dataclass(frozen=True)
class CrossValidation:
    spec: LearnerSpec
    folds: tuple[FoldEvaluation, ...]
    k: int
    seed: int

    @property
    def mean_auc(self) -> float:
        return float(np.mean([f.result.auc for f in self.folds]))

    def mean_metrics(self) -> dict[str, float | None]:
        """Per-metric mean over folds, skipping folds where a ratio was undefined."""
        out: dict[str, float | None] = {}
        for name in ("accuracy", "precision", "recall", "f1", "sensitivity", "specificity"):
            values = [
                getattr(f.result.metrics, name)
                for f in self.folds
                if getattr(f.result.metrics, name) is not None
            ]
            out[name] = float(np.mean(values)) if values else None
        out["auc"] = self.mean_auc
        return out


def cross_validate(
    data: FeatureMatrix,
    spec: LearnerSpec,
    k: int = 5,
    seed: int = 0,
    stratified: bool = True,
) -> CrossValidation:
    """k-fold protocol: per fold, fit the normalizer and the model on the
    k-1 training folds only, then evaluate on the held-out fold."""
    assignment = kfold(data, k, seed=seed, stratified=stratified)
    folds = []
    for fold, (train_idx, test_idx) in enumerate(assignment):
        train = data.take(train_idx)
        test = data.take(test_idx)
        normalizer = Normalizer.fit(train.x)
        model = fit_model(
            spec.kind, normalizer.transform_data(train), spec.params, seed=_fold_seed(seed, fold)
        )
        scores = model.scores(normalizer.transform(test.x))
        result = evaluate_scores(test.y, scores, model.decision_threshold)
        folds.append(
            FoldEvaluation(
                fold=fold,
                result=result,
                normalizer=normalizer,
                n_train=train.n,
                n_test=test.n,
            )
        )
    return CrossValidation(spec=spec, folds=tuple(folds), k=k, seed=seed)
