import os

import pytest
from hypothesis import HealthCheck, settings

from ramkr.padic import PrimeParam

settings.register_profile(
    "ramkr",
    deadline=None,
    max_examples=int(os.environ.get("RAMKR_EXAMPLES", "60")),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ramkr")


@pytest.fixture(scope="session")
def f3():
    return PrimeParam(3)


@pytest.fixture(scope="session")
def f5():
    return PrimeParam(5)


@pytest.fixture(scope="session", params=[3, 5], ids=lambda p: f"p{p}")
def field(request):
    return PrimeParam(request.param)
