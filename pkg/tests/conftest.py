import math

import pytest

from maserline import ExponentialTau, FixedTau, MaserParams


@pytest.fixture
def thermal_params():
    def make(n_th, kappa=1.0):
        return MaserParams(kappa=kappa, n_th=n_th, r=0.0, g=1.0, tau_dist=FixedTau(0.5))

    return make


@pytest.fixture
def maser_params():
    """Fixed-tau micromaser with theta specified in units of pi."""

    def make(theta_over_pi, r=50.0, n_th=0.01, kappa=1.0):
        g_tau = theta_over_pi * math.pi / math.sqrt(r / kappa)
        return MaserParams(kappa=kappa, n_th=n_th, r=r, g=g_tau * kappa, tau_dist=FixedTau(1.0 / kappa))

    return make


@pytest.fixture
def laser_params():
    """Exponential-tau laser with pump set through theta_bar at g_bar fixed."""

    def make(theta_bar, g_bar=0.3, n_th=0.0, kappa=1.0):
        r = (theta_bar / g_bar) ** 2 * kappa
        return MaserParams(kappa=kappa, n_th=n_th, r=r, g=g_bar * kappa, tau_dist=ExponentialTau(1.0 / kappa))

    return make
