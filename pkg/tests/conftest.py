import pytest
from hypothesis import settings

from hyperseries.acceptance import SuiteEnv
from hyperseries.nets import EpsGrid, Gauge

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def grid():
    return EpsGrid.decades()


@pytest.fixture(scope="session")
def rho():
    return Gauge.from_text("eps", "rho")


@pytest.fixture(scope="session")
def sigma():
    return Gauge.from_text("eps", "sigma")


@pytest.fixture(scope="session")
def env():
    return SuiteEnv.standard()
