import numpy as np
import pytest

from tripod_holonomy import high_temperature_noise, optimal_time, standard_not_loop

# First three revival times of the standard loop (Omega = 1), closed form.
OMEGA_TAU_STAR = tuple(optimal_time(k, 1, 1.0) for k in (1, 2, 3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240903)


@pytest.fixture
def not_loop():
    """Standard NOT loop at the first revival time (Omega = 1)."""
    return standard_not_loop(1.0, OMEGA_TAU_STAR[0])


@pytest.fixture
def no_noise():
    return high_temperature_noise(0.0)


def random_hermitian(rng, dim=4, scale=1.0):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (m + m.conj().T)
