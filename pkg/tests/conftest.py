import pytest
from hypothesis import settings

from micromixer.model import (
    DriveSignal,
    FluidProperties,
    Geometry,
    SubstrateThermal,
    mean_velocity_from_flow_rate,
)

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

FLOW_RATE_10_UL_HR = 10e-9 / 3600.0


@pytest.fixture
def geometry():
    return Geometry()


@pytest.fixture
def fluid():
    return FluidProperties()


@pytest.fixture
def substrate():
    return SubstrateThermal()


@pytest.fixture
def drive():
    return DriveSignal()


@pytest.fixture
def mean_velocity(geometry):
    return mean_velocity_from_flow_rate(FLOW_RATE_10_UL_HR, geometry)
