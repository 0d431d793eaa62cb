"""Shared helpers for the test suite."""
import numpy as np
import pytest

from qinet import NetworkConfig, ServiceRateProfile


def const_mu(rate, J):
    return tuple(ServiceRateProfile.constant(rate) for _ in range(J))


def make_config(lam, b, nu, mu_rate=None, beta=None):
    """Config with constant service rates, ergodic by default."""
    lam = tuple(lam)
    b = tuple(b)
    if mu_rate is None:
        mu_rate = 4.0 * max(lam)
    return NetworkConfig(
        lam=lam, mu=const_mu(mu_rate, len(b)), b=b, nu=nu, transfer_beta=beta
    )


def draw_rates(rng, n, lo=0.5, hi=2.0):
    """Log-uniform positive rates."""
    return tuple(float(x) for x in np.exp(rng.uniform(np.log(lo), np.log(hi), size=n)))


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)
