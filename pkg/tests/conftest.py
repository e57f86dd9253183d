import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from superopt.tolerances import circle_grid

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def zeta():
    return circle_grid(256)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sup(x):
    return float(np.max(np.abs(x)))
