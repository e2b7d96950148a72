"""Synthetic longitudinal cohort generator.

Draws per-sample blood parameters from truncated normal distributions whose
moments and bounds are calibrated to the published per-group summary tables,
so the screening and modelling pipeline can run without clinical data.
Parameters are drawn independently except for three deterministic identities:
the fluorescence fractions are renormalized to sum to 100, IRF = MFR + HFR,
and OFF-HR is always computed from HB and RET%. That marginals-only
calibration is a known fidelity limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .profiles import (
    Altitude,
    Cohort,
    HaematologicalProfile,
    Label,
    MEASURED_PARAMETERS,
    Period,
    Sample,
    derive_period,
)

_TRIO = ("LFR", "MFR", "HFR")
_DRAWN = tuple(p.name for p in MEASURED_PARAMETERS if p.name not in _TRIO + ("IRF",))


@dataclass(frozen=True)
class TruncatedNormal:
    """Normal(mean, std) restricted to [lo, hi] by rejection sampling."""

    mean: float
    std: float
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if self.std < 0:
            raise ValueError(f"std must be non-negative, got {self.std}")
        if not self.lo <= self.mean <= self.hi:
            raise ValueError(
                f"mean {self.mean} outside truncation bounds [{self.lo}, {self.hi}]"
            )

    def draw(self, rng: np.random.Generator) -> float:
        if self.std == 0.0:
            return self.mean
        for _ in range(100_000):
            x = rng.normal(self.mean, self.std)
            if self.lo <= x <= self.hi:
                return float(x)
        raise RuntimeError(f"rejection sampling failed for {self}")

    def blend(self, other: "TruncatedNormal", fraction: float) -> "TruncatedNormal":
        """Linear interpolation of all four parameters toward `other`."""
        if fraction <= 0.0:
            return self
        if fraction >= 1.0:
            return other
        mix = lambda a, b: (1.0 - fraction) * a + fraction * b  # noqa: E731
        return TruncatedNormal(
            mean=mix(self.mean, other.mean),
            std=mix(self.std, other.std),
            lo=mix(self.lo, other.lo),
            hi=mix(self.hi, other.hi),
        )


@dataclass(frozen=True)
class ParameterDistSpec:
    """Per-(parameter, label) truncated normals for one altitude."""

    altitude: Altitude
    entries: dict[tuple[str, Label], TruncatedNormal]

    def entry(self, name: str, label: Label) -> TruncatedNormal:
        try:
            return self.entries[(name, label)]
        except KeyError:
            raise ValueError(f"no distribution for ({name}, {label.value})") from None

    def label_blind(self) -> "ParameterDistSpec":
        """Copy with treated-group draws replaced by control draws."""
        entries = {
            (name, label): self.entry(name, Label.CONTROL)
            for (name, label) in self.entries
        }
        return ParameterDistSpec(altitude=self.altitude, entries=entries)


# (mean, std, min, max) per parameter: treated group first, control second.
_SEA_TABLE = {
    "HB": ((14.5, 1.2, 11.4, 17.0), (14.2, 1.1, 11.5, 17.0)),
    "HCT": ((42.3, 3.3, 32.8, 51.2), (41.2, 3.0, 33.2, 50.1)),
    "RET#": ((0.1, 0.0, 0.0, 0.1), (0.0, 0.0, 0.0, 0.1)),
    "RET%": ((1.4, 0.4, 0.5, 2.7), (0.9, 0.3, 0.3, 2.2)),
    "RET-HB": ((33.5, 1.7, 29.4, 36.9), (33.5, 1.8, 27.4, 38.0)),
    "MCV": ((89.5, 2.9, 84.2, 96.0), (88.9, 3.2, 81.0, 98.1)),
    "MCH": ((30.6, 1.1, 28.3, 32.8), (30.7, 1.4, 26.7, 35.1)),
    "MCHC": ((34.2, 0.8, 32.2, 36.5), (34.5, 1.1, 32.0, 38.9)),
    "RBC": ((4.7, 0.4, 3.5, 5.7), (4.6, 0.4, 3.6, 5.7)),
    "RDW-SD": ((42.5, 2.6, 37.7, 48.4), (41.7, 2.6, 35.2, 54.1)),
    "RDW-CV": ((12.9, 0.6, 11.6, 14.4), (12.7, 0.8, 11.6, 17.0)),
    "WBC": ((5.6, 1.4, 3.1, 11.1), (5.8, 1.6, 3.0, 14.8)),
    "IRF": ((9.9, 3.8, 1.1, 22.7), (6.2, 2.7, 0.0, 15.0)),
    "LFR": ((90.1, 3.8, 77.3, 98.9), (93.7, 2.7, 85.0, 99.3)),
    "MFR": ((8.6, 3.0, 1.1, 19.0), (5.7, 2.3, 0.7, 13.4)),
    "HFR": ((1.4, 0.9, 0.0, 5.7), (0.6, 0.5, 0.0, 3.0)),
    "OFF-HR": ((74.3, 15.7, 36.2, 111.6), (85.0, 14.3, 44.8, 119.1)),
}

_ALT_TABLE = {
    "HB": ((15.1, 1.4, 12.2, 17.6), (14.5, 1.1, 11.9, 16.8)),
    "HCT": ((43.6, 3.9, 35.5, 51.5), (41.7, 2.8, 34.7, 47.5)),
    "RET#": ((0.1, 0.0, 0.0, 0.1), (0.1, 0.0, 0.0, 0.1)),
    "RET%": ((1.7, 0.5, 0.8, 2.8), (1.3, 0.4, 0.5, 2.9)),
    "RET-HB": ((34.7, 1.8, 30.3, 37.7), (34.6, 1.8, 28.4, 38.0)),
    "MCV": ((89.9, 2.6, 85.4, 95.9), (87.6, 3.3, 81.3, 96.6)),
    "MCH": ((31.1, 0.9, 29.6, 32.7), (30.5, 1.4, 27.0, 33.1)),
    "MCHC": ((34.6, 0.9, 33.3, 37.7), (34.9, 0.9, 33.0, 37.4)),
    "RBC": ((4.8, 0.4, 4.3, 5.6), (4.8, 0.3, 3.7, 5.4)),
    "RDW-SD": ((44.3, 2.5, 39.1, 48.8), (42.5, 3.7, 36.6, 55.3)),
    "RDW-CV": ((13.4, 0.6, 11.8, 14.7), (13.2, 1.2, 11.8, 17.8)),
    "WBC": ((7.1, 2.3, 4.0, 14.5), (6.4, 1.9, 3.7, 12.8)),
    "IRF": ((10.3, 3.2, 4.3, 22.8), (9.3, 3.4, 0.0, 21.4)),
    "LFR": ((88.9, 3.5, 77.2, 94.4), (91.0, 3.0, 82.9, 97.8)),
    "MFR": ((9.4, 2.3, 4.9, 15.3), (7.9, 2.5, 2.2, 15.5)),
    "HFR": ((1.7, 1.5, 0.1, 7.5), (1.1, 0.6, 0.0, 2.8)),
    "OFF-HR": ((72.6, 18.6, 31.9, 107.8), (77.1, 15.5, 25.7, 111.7)),
}


def builtin_table_spec(altitude: Altitude) -> ParameterDistSpec:
    """The built-in calibration constants for one altitude.

    Includes the OFF-HR row for reference even though OFF-HR is always
    computed, never drawn.
    """
    table = _SEA_TABLE if altitude == Altitude.SEA_LEVEL else _ALT_TABLE
    entries = {}
    for name, (rhepo, control) in table.items():
        entries[(name, Label.RHEPO)] = TruncatedNormal(*rhepo)
        entries[(name, Label.CONTROL)] = TruncatedNormal(*control)
    return ParameterDistSpec(altitude=altitude, entries=entries)


@dataclass(frozen=True)
class CohortSpec:
    """Structure of a generated cohort: who, when and how much is missing."""

    n_participants: int
    rhepo_fraction: float
    altitude: Altitude
    weeks: tuple[int, ...] = tuple(range(1, 13))
    missing_rate: float = 0.0
    seed: int = 42

    def __post_init__(self) -> None:
        if self.n_participants < 1:
            raise ValueError("n_participants must be positive")
        if not 0.0 < self.rhepo_fraction < 1.0:
            raise ValueError("rhepo_fraction must be in (0, 1)")
        if not 0.0 <= self.missing_rate < 1.0:
            raise ValueError("missing_rate must be in [0, 1)")
        for week in self.weeks:
            derive_period(week)

    @property
    def n_rhepo_arm(self) -> int:
        return int(round(self.n_participants * self.rhepo_fraction))

    @classmethod
    def default(cls, altitude: Altitude, seed: int = 42, missing_rate: float = 0.0) -> "CohortSpec":
        # Study defaults: 25 of 35 sea-level participants in the treated arm,
        # 12 of 39 at high altitude.
        if altitude == Altitude.SEA_LEVEL:
            return cls(35, 25 / 35, altitude, missing_rate=missing_rate, seed=seed)
        return cls(39, 12 / 39, altitude, missing_rate=missing_rate, seed=seed)


def treatment_blend_fraction(week: int) -> float:
    """How far a treated-arm draw sits toward the treated distribution.

    Full effect during intervention weeks, then a linear two-week washout
    into follow-up.
    """
    period = derive_period(week)
    if period == Period.INTERVENTION:
        return 1.0
    if week == 9:
        return 2.0 / 3.0
    if week == 10:
        return 1.0 / 3.0
    return 0.0


def _draw_trio(rng: np.random.Generator, dists: dict[str, TruncatedNormal]) -> dict[str, float]:
    # Renormalizing to sum 100 can push a value past its bound; redraw until
    # the renormalized triple also respects every bound.
    for _ in range(100_000):
        raw = {name: dists[name].draw(rng) for name in _TRIO}
        total = sum(raw.values())
        if total <= 0.0:
            continue
        scaled = {name: value * 100.0 / total for name, value in raw.items()}
        if all(dists[name].lo <= scaled[name] <= dists[name].hi for name in _TRIO):
            return scaled
    raise RuntimeError("fluorescence fraction sampling failed to satisfy bounds")


def generate_cohort(spec: CohortSpec, dist: ParameterDistSpec | None = None) -> Cohort:
    """Generate one labelled longitudinal cohort.

    Treated-arm participants draw from the treated columns during
    intervention weeks (with the washout blend afterwards) and from the
    control columns otherwise; a sample is labelled treated only when drawn
    in an intervention week. Deterministic per (spec, dist): participant i
    uses the RNG substream (seed, i).
    """
    if dist is None:
        dist = builtin_table_spec(spec.altitude)
    if dist.altitude != spec.altitude:
        raise ValueError(
            f"distribution table is for {dist.altitude.value}, spec wants {spec.altitude.value}"
        )
    n_rhepo = spec.n_rhepo_arm
    width = max(2, len(str(spec.n_participants)))
    samples = []
    for p_index in range(spec.n_participants):
        rng = np.random.default_rng((spec.seed, p_index))
        in_treated_arm = p_index < n_rhepo
        pid = f"P{p_index + 1:0{width}d}"
        for week in spec.weeks:
            fraction = treatment_blend_fraction(week) if in_treated_arm else 0.0
            dists = {
                name: dist.entry(name, Label.CONTROL).blend(dist.entry(name, Label.RHEPO), fraction)
                for name in _DRAWN + _TRIO
            }
            values = {name: dists[name].draw(rng) for name in _DRAWN}
            values.update(_draw_trio(rng, dists))
            values["IRF"] = values["MFR"] + values["HFR"]
            profile = HaematologicalProfile(
                **{p.attr: values[p.name] for p in MEASURED_PARAMETERS}
            )
            label = Label.RHEPO if in_treated_arm and fraction >= 1.0 else Label.CONTROL
            samples.append(Sample(pid, spec.altitude, week, label, profile))
    provenance = f"synthetic:{spec.altitude.value}:seed={spec.seed}"
    cohort = Cohort(tuple(samples), provenance=provenance)
    if spec.missing_rate > 0.0:
        cohort = inject_missingness(cohort, spec.missing_rate, spec.seed)
    return cohort


def inject_missingness(cohort: Cohort, rate: float, seed: int) -> Cohort:
    """Blank each measured cell independently with the given probability.

    Labels, altitudes and weeks are never touched.
    """
    if not 0.0 <= rate < 1.0:
        raise ValueError("rate must be in [0, 1)")
    if rate == 0.0:
        return cohort
    rng = np.random.default_rng(seed)
    blanked = []
    for sample in cohort:
        values = {
            p.attr: getattr(sample.profile, p.attr) for p in MEASURED_PARAMETERS
        }
        changed = False
        for param in MEASURED_PARAMETERS:
            if rng.random() < rate:
                values[param.attr] = None
                changed = True
        if changed:
            sample = replace(sample, profile=HaematologicalProfile(**values))
        blanked.append(sample)
    return Cohort(tuple(blanked), provenance=cohort.provenance)
