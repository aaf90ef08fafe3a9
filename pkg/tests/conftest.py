import pytest

from optiplan import (
    DynamicsParams,
    GenConfig,
    SpatialIndex,
    TaskConfig,
    generate_scenario,
)
from scenario_helpers import make_empty_scenario


@pytest.fixture(scope="session")
def default_dyn():
    return DynamicsParams()


@pytest.fixture(scope="session")
def default_task():
    return TaskConfig()


@pytest.fixture(scope="session")
def small_scenario():
    return generate_scenario(7, GenConfig(n_obstacles=3))


@pytest.fixture(scope="session")
def small_world(small_scenario):
    return SpatialIndex(small_scenario)


@pytest.fixture(scope="session")
def empty_world():
    return SpatialIndex(make_empty_scenario())
