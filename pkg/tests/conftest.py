import math

import numpy as np
import pytest

from lw6.worldline import NumericWorldline, builtin_worldline


def ramp_position(tau):
    """Rapidity ``log(2 + tau)`` along axis 1; proper acceleration ``1/(2 + tau)``."""
    p = 2.0 + tau
    return np.array([(0.5 * p * p + math.log(p)) / 2.0, (0.5 * p * p - math.log(p)) / 2.0, 0, 0, 0, 0])


def ramp_velocity(tau):
    p = 2.0 + tau
    return np.array([(p + 1.0 / p) / 2.0, (p - 1.0 / p) / 2.0, 0, 0, 0, 0])


@pytest.fixture(scope="session")
def hyperbolic():
    return builtin_worldline("hyperbolic", g=1.0)


@pytest.fixture(scope="session")
def helical():
    return builtin_worldline("helical", radius=1.0, beta=0.5, drift=0.3)


@pytest.fixture(scope="session")
def circular():
    return builtin_worldline("circular", radius=1.0, beta=0.6)


@pytest.fixture(scope="session")
def uniform():
    return builtin_worldline("uniform", velocity=(0.3, -0.2, 0.1, 0.0, 0.4))


@pytest.fixture(scope="session")
def ramp():
    return NumericWorldline(ramp_position, domain=(-1.0, 5.0), probe_tau=0.5)
