import pytest

from epodetect import Altitude, CohortSpec, builtin_table_spec, generate_cohort


@pytest.fixture(scope="session")
def sea_cohort():
    """Default calibrated sea-level cohort, seed 42."""
    return generate_cohort(CohortSpec.default(Altitude.SEA_LEVEL, seed=42))


@pytest.fixture(scope="session")
def alt_cohort():
    """Default calibrated high-altitude cohort, seed 42."""
    return generate_cohort(CohortSpec.default(Altitude.HIGH_ALTITUDE, seed=42))


@pytest.fixture(scope="session")
def label_blind_cohort():
    """Sea-level cohort whose treated-arm draws use the control columns."""
    spec = CohortSpec.default(Altitude.SEA_LEVEL, seed=42)
    return generate_cohort(spec, builtin_table_spec(Altitude.SEA_LEVEL).label_blind())
