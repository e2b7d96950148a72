"""Haematological profile data model: blood parameters, cohort CSV ingestion,
derived scores and median imputation.

A profile holds 16 measured blood parameters plus the derived OFF-HR score.
Samples are longitudinal: one blood draw per (participant, altitude, week),
labelled either as a control draw or as one taken under rhEPO treatment.
All containers are immutable; every operation returns new values.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from statistics import median
from typing import IO, Iterable, Iterator


class Altitude(str, Enum):
    SEA_LEVEL = "sea"
    HIGH_ALTITUDE = "alt"


class Period(str, Enum):
    BASELINE = "baseline"
    INTERVENTION = "intervention"
    FOLLOW_UP = "followup"


class Label(str, Enum):
    CONTROL = "control"
    RHEPO = "rhepo"


class CohortParseError(ValueError):
    """Malformed cohort CSV content; carries the offending row number."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class CohortIntegrityError(ValueError):
    """Structural violation, e.g. duplicate (participant, altitude, week)."""


class ImputationError(ValueError):
    """A parameter cannot be imputed because no donor values exist."""


@dataclass(frozen=True)
class Parameter:
    """One named blood parameter and where it lives on a profile."""

    name: str
    attr: str
    csv_column: str | None
    percent: bool = False


PARAMETERS: tuple[Parameter, ...] = (
    Parameter("HB", "hb", "HB"),
    Parameter("HCT", "hct", "HCT", percent=True),
    Parameter("RET#", "ret_count", "RET_COUNT"),
    Parameter("RET%", "ret_pct", "RET_PCT", percent=True),
    Parameter("RET-HB", "ret_hb", "RET_HB"),
    Parameter("MCV", "mcv", "MCV"),
    Parameter("MCH", "mch", "MCH"),
    Parameter("MCHC", "mchc", "MCHC"),
    Parameter("RBC", "rbc", "RBC"),
    Parameter("RDW-SD", "rdw_sd", "RDW_SD"),
    Parameter("RDW-CV", "rdw_cv", "RDW_CV", percent=True),
    Parameter("WBC", "wbc", "WBC"),
    Parameter("IRF", "irf", "IRF", percent=True),
    Parameter("LFR", "lfr", "LFR", percent=True),
    Parameter("MFR", "mfr", "MFR", percent=True),
    Parameter("HFR", "hfr", "HFR", percent=True),
    Parameter("OFF-HR", "off_hr", None),
)

MEASURED_PARAMETERS: tuple[Parameter, ...] = tuple(
    p for p in PARAMETERS if p.csv_column is not None
)
PARAMETER_NAMES: tuple[str, ...] = tuple(p.name for p in PARAMETERS)

_BY_NAME = {p.name: p for p in PARAMETERS}
_BY_ATTR = {p.attr: p for p in PARAMETERS}

FLUORESCENCE_SUM_TOLERANCE = 0.5


def parameter(name: str) -> Parameter:
    """Look up a parameter by its display name (e.g. "RET%")."""
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown parameter {name!r}; expected one of {PARAMETER_NAMES}") from None


def compute_off_hr(hb_g_per_l: float, ret_pct: float) -> float:
    """OFF-HR score from haemoglobin in g/L and reticulocyte percentage.

    Profiles store HB in g/dL; multiply by 10 before calling.
    """
    if hb_g_per_l < 0:
        raise ValueError(f"haemoglobin must be non-negative, got {hb_g_per_l}")
    if ret_pct < 0:
        raise ValueError(f"reticulocyte percentage must be non-negative, got {ret_pct}")
    return hb_g_per_l - 60.0 * math.sqrt(ret_pct)


def derive_period(week: int) -> Period:
    """Map a study week (1 to 12) onto its period.

    Week 8 belongs to the intervention window: injections run through it.
    """
    if not 1 <= week <= 12:
        raise ValueError(f"week must be in 1..12, got {week}")
    if week <= 4:
        return Period.BASELINE
    if week <= 8:
        return Period.INTERVENTION
    return Period.FOLLOW_UP


@dataclass(frozen=True)
class HaematologicalProfile:
    """The 16 measured blood parameters of one sample, plus derived OFF-HR.

    Any measured field may be None (missing) before imputation. OFF-HR is
    recomputed from HB and RET% on construction and is never supplied.
    """

    hb: float | None = None
    hct: float | None = None
    ret_count: float | None = None
    ret_pct: float | None = None
    ret_hb: float | None = None
    mcv: float | None = None
    mch: float | None = None
    mchc: float | None = None
    rbc: float | None = None
    rdw_sd: float | None = None
    rdw_cv: float | None = None
    wbc: float | None = None
    irf: float | None = None
    lfr: float | None = None
    mfr: float | None = None
    hfr: float | None = None
    off_hr: float | None = field(init=False, default=None)

    def __post_init__(self) -> None:
        for param in MEASURED_PARAMETERS:
            value = getattr(self, param.attr)
            if value is None:
                continue
            if not math.isfinite(value):
                raise ValueError(f"{param.name} must be finite, got {value}")
            if value < 0:
                raise ValueError(f"{param.name} must be non-negative, got {value}")
            if param.percent and value > 100:
                raise ValueError(f"{param.name} is a percentage, got {value} > 100")
        if self.hb is not None and self.ret_pct is not None:
            object.__setattr__(self, "off_hr", compute_off_hr(10.0 * self.hb, self.ret_pct))

    def missing(self) -> tuple[str, ...]:
        """Attribute names of measured fields that are absent."""
        return tuple(p.attr for p in MEASURED_PARAMETERS if getattr(self, p.attr) is None)

    def fluorescence_sum_error(self) -> float | None:
        """|LFR + MFR + HFR - 100|, or None while any of the three is missing."""
        if self.lfr is None or self.mfr is None or self.hfr is None:
            return None
        return abs(self.lfr + self.mfr + self.hfr - 100.0)


@dataclass(frozen=True)
class Sample:
    """One labelled blood draw within the longitudinal study design."""

    participant_id: str
    altitude: Altitude
    week: int
    label: Label
    profile: HaematologicalProfile

    def __post_init__(self) -> None:
        if not self.participant_id:
            raise ValueError("participant_id must be non-empty")
        derive_period(self.week)

    @property
    def period(self) -> Period:
        return derive_period(self.week)

    @property
    def key(self) -> tuple[str, Altitude, int]:
        return (self.participant_id, self.altitude, self.week)


@dataclass(frozen=True)
class Cohort:
    """An ordered, immutable collection of samples with unique draw keys."""

    samples: tuple[Sample, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        seen: set[tuple[str, Altitude, int]] = set()
        for sample in self.samples:
            if sample.key in seen:
                pid, altitude, week = sample.key
                raise CohortIntegrityError(
                    f"duplicate sample key ({pid}, {altitude.value}, {week})"
                )
            seen.add(sample.key)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def at_altitude(self, altitude: Altitude) -> "Cohort":
        return Cohort(
            tuple(s for s in self.samples if s.altitude == altitude),
            provenance=self.provenance,
        )

    def count(self, altitude: Altitude, label: Label) -> int:
        return sum(1 for s in self.samples if s.altitude == altitude and s.label == label)

    def has_missing(self) -> bool:
        return any(s.profile.missing() for s in self.samples)


def quality_issues(cohort: Cohort) -> list[str]:
    """Soft data-quality complaints that are not hard parse errors.

    Median imputation fills fields one at a time, so an imputed profile may
    legitimately break the LFR+MFR+HFR sum; report rather than reject.
    """
    issues = []
    for sample in cohort:
        err = sample.profile.fluorescence_sum_error()
        if err is not None and err > FLUORESCENCE_SUM_TOLERANCE:
            pid, altitude, week = sample.key
            issues.append(
                f"({pid}, {altitude.value}, week {week}): LFR+MFR+HFR off by {err:.2f}"
            )
    return issues


CSV_COLUMNS: tuple[str, ...] = ("participant_id", "altitude", "week", "label") + tuple(
    p.csv_column for p in MEASURED_PARAMETERS  # type: ignore[misc]
)

_ALTITUDE_TOKENS = {a.value: a for a in Altitude}
_LABEL_TOKENS = {lbl.value: lbl for lbl in Label}


def _open_text(source: str | Path | IO) -> tuple[IO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or "b" in getattr(source, "mode", ""):
        return io.TextIOWrapper(source, encoding="utf-8", newline=""), False
    return source, False


def read_cohort_csv(source: str | Path | IO, provenance: str | None = None) -> Cohort:
    """Parse a cohort CSV stream or file.

    Empty measured cells become missing values. OFF-HR is never read; it is
    recomputed from HB and RET%. Raises CohortParseError with the offending
    row number, or CohortIntegrityError on duplicate draw keys.
    """
    stream, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise CohortParseError("empty file: missing header row") from None
        if tuple(header) != CSV_COLUMNS:
            raise CohortParseError(
                f"bad header {header!r}; expected {','.join(CSV_COLUMNS)}"
            )
        samples = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise CohortParseError(
                    f"expected {len(CSV_COLUMNS)} fields, got {len(row)}", row=row_no
                )
            pid, altitude_tok, week_tok, label_tok = (cell.strip() for cell in row[:4])
            if not pid:
                raise CohortParseError("participant_id is empty", row=row_no)
            if altitude_tok not in _ALTITUDE_TOKENS:
                raise CohortParseError(
                    f"altitude {altitude_tok!r} not in {sorted(_ALTITUDE_TOKENS)}", row=row_no
                )
            if label_tok not in _LABEL_TOKENS:
                raise CohortParseError(
                    f"label {label_tok!r} not in {sorted(_LABEL_TOKENS)}", row=row_no
                )
            try:
                week = int(week_tok)
            except ValueError:
                raise CohortParseError(f"week {week_tok!r} is not an integer", row=row_no) from None
            values: dict[str, float | None] = {}
            for param, cell in zip(MEASURED_PARAMETERS, row[4:]):
                cell = cell.strip()
                if not cell:
                    values[param.attr] = None
                    continue
                try:
                    values[param.attr] = float(cell)
                except ValueError:
                    raise CohortParseError(
                        f"{param.csv_column} value {cell!r} is not a number", row=row_no
                    ) from None
            try:
                profile = HaematologicalProfile(**values)
                sample = Sample(pid, _ALTITUDE_TOKENS[altitude_tok], week, _LABEL_TOKENS[label_tok], profile)
            except ValueError as exc:
                raise CohortParseError(str(exc), row=row_no) from None
            samples.append(sample)
        name = provenance if provenance is not None else getattr(source, "name", str(source))
        return Cohort(tuple(samples), provenance=str(name))
    finally:
        if owned:
            stream.close()


def cohort_to_csv_text(cohort: Cohort) -> str:
    """Serialize a cohort to CSV text that read_cohort_csv round-trips exactly."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for sample in cohort:
        row = [sample.participant_id, sample.altitude.value, str(sample.week), sample.label.value]
        for param in MEASURED_PARAMETERS:
            value = getattr(sample.profile, param.attr)
            row.append("" if value is None else repr(value))
        writer.writerow(row)
    return out.getvalue()


def write_cohort_csv(cohort: Cohort, dest: str | Path) -> None:
    Path(dest).write_text(cohort_to_csv_text(cohort), encoding="utf-8")


def _median_or_none(values: list[float]) -> float | None:
    return median(values) if values else None


def impute_missing(cohort: Cohort) -> Cohort:
    """Fill missing measured fields by median imputation.

    The donor pool is the same participant at the same altitude; when that
    pool is empty for a field, the altitude-wide cohort median is used.
    OFF-HR is recomputed after filling. Idempotent, and never alters a
    value that is already present.
    """
    if not cohort.has_missing():
        return cohort

    by_group: dict[tuple[str, Altitude, str], list[float]] = {}
    by_altitude: dict[tuple[Altitude, str], list[float]] = {}
    for sample in cohort:
        for param in MEASURED_PARAMETERS:
            value = getattr(sample.profile, param.attr)
            if value is None:
                continue
            by_group.setdefault((sample.participant_id, sample.altitude, param.attr), []).append(value)
            by_altitude.setdefault((sample.altitude, param.attr), []).append(value)

    filled = []
    for sample in cohort:
        attrs_missing = sample.profile.missing()
        if not attrs_missing:
            filled.append(sample)
            continue
        values = {
            p.attr: getattr(sample.profile, p.attr) for p in MEASURED_PARAMETERS
        }
        for attr in attrs_missing:
            fill = _median_or_none(
                by_group.get((sample.participant_id, sample.altitude, attr), [])
            )
            if fill is None:
                fill = _median_or_none(by_altitude.get((sample.altitude, attr), []))
            if fill is None:
                raise ImputationError(
                    f"{_BY_ATTR[attr].name} is missing for every sample at altitude "
                    f"{sample.altitude.value}; nothing to impute from"
                )
            values[attr] = fill
        filled.append(replace(sample, profile=HaematologicalProfile(**values)))
    return Cohort(tuple(filled), provenance=cohort.provenance)
