import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from raman3nls.spectral_core import EquationParams, SpectralState

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def generic_params():
    # satisfies Gamma > 0, alpha1 != 0 and 2 alpha2 / (3 alpha1) = 4/15 not an integer
    return EquationParams(alpha1=1.0, alpha2=0.4, gamma1=1.0, gamma2=1.0, Gamma=1.0)


def smooth_state(N, seed, decay=0.5, scale=1.0):
    return SpectralState.random(N, np.random.default_rng(seed), decay=decay, scale=scale)
