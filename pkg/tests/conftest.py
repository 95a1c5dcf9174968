import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from qfield.medium import natural_units
from qfield.modes import FrequencyGrid, GridUniverse

# universes/grids are immutable, so sharing function-scoped fixtures across
# generated examples is safe
settings.register_profile(
    "qfield",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("qfield")


@pytest.fixture
def medium():
    return natural_units()


@pytest.fixture
def grid1():
    """Single-frequency grid: four modes L1, L2, R1, R2 at omega = 1."""
    return FrequencyGrid(omega_min=1.0, delta_omega=1.0, count=1)


@pytest.fixture
def grid8():
    return FrequencyGrid(omega_min=1.0, delta_omega=1.0, count=8)


@pytest.fixture
def universe1(grid1):
    return GridUniverse(grid1)


@pytest.fixture
def universe8(grid8):
    return GridUniverse(grid8)
