import pytest

from plantwatch.config import NoiseSpec, load_config
from plantwatch.harness import run_catalog, run_nominal


@pytest.fixture
def cfg():
    return load_config()


@pytest.fixture
def quiet_cfg():
    config = load_config()
    config.noise = NoiseSpec(enabled=False)
    return config


@pytest.fixture(scope="session")
def nominal_10k():
    return run_nominal(ticks=10_000)


@pytest.fixture(scope="session")
def catalog_2016():
    return run_catalog(2016)


@pytest.fixture(scope="session")
def catalog_2017():
    return run_catalog(2017)
