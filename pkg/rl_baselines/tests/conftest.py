import pytest

from rl_baselines import BridgeClient


@pytest.fixture(scope="session")
def client():
    c = BridgeClient()
    c.hello()
    yield c
    c.close()
