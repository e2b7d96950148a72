"""Shared builders for hand-made cohorts used across the test suite."""

from __future__ import annotations

from epodetect import Altitude, Cohort, HaematologicalProfile, Label, Sample

# A physiologically sensible control-like profile; the fluorescence trio
# sums to exactly 100.
PROFILE_DEFAULTS = dict(
    hb=14.0,
    hct=42.0,
    ret_count=0.05,
    ret_pct=1.0,
    ret_hb=33.0,
    mcv=89.0,
    mch=30.0,
    mchc=34.0,
    rbc=4.6,
    rdw_sd=42.0,
    rdw_cv=12.8,
    wbc=5.5,
    irf=6.3,
    lfr=93.7,
    mfr=5.7,
    hfr=0.6,
)


def make_profile(**overrides) -> HaematologicalProfile:
    return HaematologicalProfile(**{**PROFILE_DEFAULTS, **overrides})


def make_sample(
    pid: str = "P01",
    altitude: Altitude = Altitude.SEA_LEVEL,
    week: int = 1,
    label: Label = Label.CONTROL,
    **profile_overrides,
) -> Sample:
    return Sample(pid, altitude, week, label, make_profile(**profile_overrides))


def make_cohort(*samples: Sample, provenance: str = "test") -> Cohort:
    return Cohort(tuple(samples), provenance=provenance)
