import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vaxdyn import AttitudePolicy, ModelParams
from vaxdyn.equilibria import NearTangencyWarning

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


@pytest.fixture
def p10():
    return ModelParams(R0=4.0, v=50.0, h=10.0, epsilon=5e-4)


@pytest.fixture
def p0():
    return ModelParams(R0=4.0, v=50.0, h=0.0, epsilon=5e-4)


@pytest.fixture
def bistable():
    """Peaked scenario with three endemic equilibria."""
    return ModelParams(h=10.0), AttitudePolicy.peaked(10.0, 0.6, 0.73)


@pytest.fixture(autouse=True)
def _quiet_tangency():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearTangencyWarning)
        yield


def fd_jacobian(f, u, rel=1e-6):
    """Central differences with per-component step."""
    u = np.asarray(u, dtype=float)
    cols = []
    for k in range(len(u)):
        h = rel * max(1.0, abs(u[k]))
        e = np.zeros_like(u)
        e[k] = h
        cols.append((f(u + e) - f(u - e)) / (2 * h))
    return np.array(cols).T
