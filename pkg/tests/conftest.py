import pytest
from hypothesis import HealthCheck, settings

from mellingamma.rootdata import build_root_datum

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def gl1():
    return build_root_datum({"preset": "GL", "rank": 1})


@pytest.fixture(scope="session")
def gl2():
    return build_root_datum({"preset": "GL", "rank": 2})


@pytest.fixture(scope="session")
def gl3():
    return build_root_datum({"preset": "GL", "rank": 3})


@pytest.fixture(scope="session")
def b2():
    return build_root_datum({"preset": "B", "rank": 2})
