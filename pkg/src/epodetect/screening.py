"""Two-sample Kolmogorov-Smirnov screening of blood parameters.

Control and treated samples are compared parameter by parameter through the
supremum gap between their empirical CDFs; parameters whose gap clears the
rejection threshold at the chosen significance level are selected as
classifier inputs, ordered by ascending p-value. A Pearson correlation filter
can then discard redundant near-duplicates among the selected parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import Altitude, Cohort, Label, PARAMETERS


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous empirical CDF: F(x) = #(values <= x) / n."""

    sorted_values: np.ndarray

    @classmethod
    def from_sample(cls, values) -> "EmpiricalCdf":
        arr = np.sort(np.asarray(values, dtype=float))
        if arr.size == 0:
            raise ValueError("empirical CDF needs at least one value")
        return cls(arr)

    def __call__(self, x):
        counts = np.searchsorted(self.sorted_values, x, side="right")
        return counts / self.sorted_values.size


def ks_statistic(a, b) -> float:
    """Exact supremum of |F_a - F_b| over all pooled breakpoints.

    Both step functions are evaluated at every pooled value, which handles
    tied observations exactly; no jittering.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    f_a = np.searchsorted(a, pooled, side="right") / a.size
    f_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(f_a - f_b)))


def ks_critical(alpha: float, n_a: int, n_b: int) -> float:
    """Rejection threshold for the two-sample statistic at level alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if n_a < 1 or n_b < 1:
        raise ValueError("sample sizes must be positive")
    return math.sqrt(-math.log(alpha / 2.0) * (1.0 + n_b / n_a) / (2.0 * n_b))


def ks_pvalue(d: float, n_a: int, n_b: int) -> float:
    """Asymptotic two-sided p-value of an observed statistic d.

    Kolmogorov series 2*sum_k (-1)^(k-1) exp(-2 k^2 lambda^2) with
    lambda = d*sqrt(n_a*n_b/(n_a+n_b)); terms below 1e-12 are dropped and
    the result is clamped to [0, 1].
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"statistic must be in [0, 1], got {d}")
    lam = d * math.sqrt(n_a * n_b / (n_a + n_b))
    if lam < 1e-9:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 100_000):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_permutation_pvalue(a, b, n_perm: int = 10_000, seed: int = 0) -> float:
    """Permutation p-value: fraction of label shuffles with statistic >= observed.

    The verification oracle for the asymptotic series; the pooled sort order
    is fixed once and tie groups are evaluated at their last position, which
    matches ks_statistic exactly.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    if n_perm < 1:
        raise ValueError("n_perm must be positive")
    observed = ks_statistic(a, b)
    pooled = np.sort(np.concatenate([a, b]))
    group_last = np.nonzero(np.r_[pooled[1:] != pooled[:-1], True])[0]
    base = np.r_[np.full(a.size, 1.0 / a.size), np.full(b.size, -1.0 / b.size)]
    rng = np.random.default_rng(seed)
    exceed = 0
    chunk = max(1, min(n_perm, 4_000_000 // max(1, pooled.size)))
    done = 0
    while done < n_perm:
        rows = min(chunk, n_perm - done)
        weights = rng.permuted(np.tile(base, (rows, 1)), axis=1)
        stats = np.max(np.abs(np.cumsum(weights, axis=1)[:, group_last]), axis=1)
        exceed += int(np.sum(stats >= observed - 1e-12))
        done += rows
    return exceed / n_perm


@dataclass(frozen=True)
class SummaryStats:
    """Location and spread summary matching the published table layout."""

    mean: float
    std: float
    min: float
    iq1: float
    median: float
    iq3: float
    max: float


def summarize(values) -> SummaryStats:
    """Mean, sample std (n-1) and quartiles by linear interpolation at (n-1)*q.

    Computed over the sorted values, so the result is bit-identical under any
    permutation of the input.
    """
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise ValueError("cannot summarize an empty sample")
    iq1, med, iq3 = np.quantile(arr, [0.25, 0.5, 0.75])
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return SummaryStats(
        mean=float(np.mean(arr)),
        std=std,
        min=float(np.min(arr)),
        iq1=float(iq1),
        median=float(med),
        iq3=float(iq3),
        max=float(np.max(arr)),
    )


@dataclass(frozen=True)
class KsResult:
    """Outcome of one two-sample test: statistic, threshold and decision."""

    d_statistic: float
    p_value: float
    critical_value: float
    alpha: float
    n_a: int
    n_b: int
    reject: bool

    @classmethod
    def from_samples(cls, a, b, alpha: float) -> "KsResult":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        d = ks_statistic(a, b)
        critical = ks_critical(alpha, a.size, b.size)
        return cls(
            d_statistic=d,
            p_value=ks_pvalue(d, a.size, b.size),
            critical_value=critical,
            alpha=alpha,
            n_a=int(a.size),
            n_b=int(b.size),
            reject=d > critical,
        )


@dataclass(frozen=True)
class ParameterScreen:
    """Per-parameter test results plus the selected parameter names.

    `selected` holds the rejecting parameters in ascending p-value order
    (ties broken by table order), possibly thinned by the correlation filter.
    """

    results: dict[str, KsResult]
    selected: tuple[str, ...]
    alpha: float
    altitude: Altitude | None = None


def parameter_values(cohort: Cohort, name: str, label: Label | None = None) -> np.ndarray:
    """Column of one parameter over a cohort, optionally restricted by label."""
    from .profiles import parameter

    attr = parameter(name).attr
    values = [
        getattr(s.profile, attr)
        for s in cohort
        if label is None or s.label == label
    ]
    if any(v is None for v in values):
        raise ValueError(f"{name} has missing values; impute the cohort first")
    return np.asarray(values, dtype=float)


def screen_parameters(cohort: Cohort, altitude: Altitude, alpha: float = 0.001) -> ParameterScreen:
    """Run the two-sample test for every parameter, splitting by label.

    The control group plays the role of sample a and the treated group of
    sample b. The cohort must be imputed and contain both labels at the
    requested altitude.
    """
    sub = cohort.at_altitude(altitude)
    if sub.has_missing():
        raise ValueError("cohort has missing values; impute before screening")
    results: dict[str, KsResult] = {}
    for param in PARAMETERS:
        control = parameter_values(sub, param.name, Label.CONTROL)
        rhepo = parameter_values(sub, param.name, Label.RHEPO)
        if control.size == 0 or rhepo.size == 0:
            raise ValueError(
                f"screening needs both labels at altitude {altitude.value}; "
                f"got {control.size} control and {rhepo.size} rhepo samples"
            )
        results[param.name] = KsResult.from_samples(control, rhepo, alpha)
    order = {p.name: i for i, p in enumerate(PARAMETERS)}
    selected = tuple(
        sorted(
            (name for name, r in results.items() if r.reject),
            key=lambda name: (results[name].p_value, order[name]),
        )
    )
    return ParameterScreen(results=results, selected=selected, alpha=alpha, altitude=altitude)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    sx = float(np.std(x))
    sy = float(np.std(y))
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float(np.mean((x - np.mean(x)) * (y - np.mean(y))) / (sx * sy))


def correlation_filter(cohort: Cohort, selected, threshold: float = 0.9) -> tuple[str, ...]:
    """Drop selected parameters that duplicate an earlier (better) one.

    `selected` is processed in its given priority order (ascending p-value
    from screening); a candidate is dropped when its absolute Pearson
    correlation with any already kept parameter exceeds the threshold, which
    always discards the member of a correlated pair with the larger p-value.
    """
    if len(cohort) < 2:
        raise ValueError("correlation filter needs at least two samples")
    columns = {name: parameter_values(cohort, name) for name in selected}
    kept: list[str] = []
    for name in selected:
        if all(abs(_pearson(columns[name], columns[other])) <= threshold for other in kept):
            kept.append(name)
    return tuple(kept)


def apply_correlation_filter(
    screen: ParameterScreen, cohort: Cohort, threshold: float = 0.9
) -> ParameterScreen:
    """Return a screen whose selection passed the correlation filter."""
    sub = cohort.at_altitude(screen.altitude) if screen.altitude is not None else cohort
    kept = correlation_filter(sub, screen.selected, threshold)
    return ParameterScreen(
        results=screen.results, selected=kept, alpha=screen.alpha, altitude=screen.altitude
    )
