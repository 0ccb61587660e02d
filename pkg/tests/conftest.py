import mpmath
import numpy as np
import pytest

from qcollapse.params import params_for_gamma

mpmath.mp.dps = 50


def mp_profile(gamma: float, xi: float) -> complex:
    """R(xi) of the closed form in 50-digit arithmetic."""
    alpha = mpmath.sqrt(4 * mpmath.mpf(gamma) - 1)
    half = 1j * alpha / 2
    A1 = mpmath.power(2, half) * mpmath.gamma(1 + half) * mpmath.gamma((5 - 1j * alpha) / 4)
    A2 = mpmath.exp(-mpmath.pi * alpha / 4) * mpmath.gamma(1 - half) * mpmath.gamma((5 + 1j * alpha) / 4)
    mu1, mu2 = -0.5 - half, -0.5 + half
    x = mpmath.mpf(xi)
    z = -1j * x * x / 2
    value = (A1 * mpmath.power(x, mu1) * mpmath.hyp1f1(mu1 / 2, mu1 + 1.5, z)
             - A2 * mpmath.power(x, mu2) * mpmath.hyp1f1(mu2 / 2, mu2 + 1.5, z))
    return complex(value)


@pytest.fixture(params=[0.5, 1.0, 2.0], ids=lambda g: f"gamma={g:g}")
def params(request):
    return params_for_gamma(request.param)


@pytest.fixture
def unit_params():
    return params_for_gamma(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
