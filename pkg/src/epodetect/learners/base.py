"""Feature matrix container shared by all learners."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..profiles import Cohort, Label, parameter


@dataclass(frozen=True)
class FeatureMatrix:
    """n samples by d features with binary labels (1 = treated, 0 = control)."""

    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=int)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"feature matrix must be 2-D and non-empty, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("feature matrix contains non-finite values")
        if y.shape != (x.shape[0],):
            raise ValueError(f"labels shape {y.shape} does not match {x.shape[0]} rows")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        if len(self.feature_names) != x.shape[1]:
            raise ValueError("feature_names must name every column")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def d(self) -> int:
        return int(self.x.shape[1])

    def take(self, indices) -> "FeatureMatrix":
        idx = np.asarray(indices, dtype=int)
        return FeatureMatrix(self.x[idx], self.y[idx], self.feature_names)

    @classmethod
    def from_cohort(cls, cohort: Cohort, feature_names) -> "FeatureMatrix":
        """Extract named parameter columns and treated/control labels."""
        attrs = [parameter(name).attr for name in feature_names]
        rows = []
        labels = []
        for sample in cohort:
            values = [getattr(sample.profile, attr) for attr in attrs]
            if any(v is None for v in values):
                raise ValueError(
                    f"sample {sample.key} has missing features; impute the cohort first"
                )
            rows.append(values)
            labels.append(1 if sample.label == Label.RHEPO else 0)
        return cls(np.asarray(rows, dtype=float), np.asarray(labels, dtype=int), tuple(feature_names))
