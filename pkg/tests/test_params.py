import math

import pytest

from qcollapse.errors import FallConditionViolated, InvalidInput
from qcollapse.params import classical_fall_allowed, derive_params, params_for_gamma


def test_s_wave_unit_strength():
    p = derive_params(1.0, 0, 1.0, 1.0)
    assert p.gamma == 1.0
    assert p.alpha == pytest.approx(math.sqrt(3.0), rel=1e-15)
    assert p.chi == 1.0
    assert p.nu == 0.5


def test_centrifugal_term_reduces_gamma():
    p = derive_params(2.5, 1)
    assert p.gamma == pytest.approx(0.5)
    assert p.alpha == pytest.approx(1.0)


@pytest.mark.parametrize("beta_tilde,ell", [(0.25, 0), (0.1, 0), (2.0, 1), (6.0, 2)])
def test_fall_condition_rejected(beta_tilde, ell):
    with pytest.raises(FallConditionViolated, match=r"gamma > 1/4"):
        derive_params(beta_tilde, ell)


@pytest.mark.parametrize("kwargs", [
    dict(beta_tilde=float("nan")),
    dict(beta_tilde=1.0, hbar=0.0),
    dict(beta_tilde=1.0, mass=-1.0),
    dict(beta_tilde=1.0, hbar=float("inf")),
    dict(beta_tilde=1.0, ell=-1),
    dict(beta_tilde=1.0, ell=1.5),
])
def test_invalid_inputs(kwargs):
    with pytest.raises(InvalidInput):
        derive_params(**kwargs)


def test_alpha_squared_matches_gamma():
    for gamma in (0.26, 0.5, 1.0, 3.7, 10.0):
        p = params_for_gamma(gamma)
        assert p.alpha ** 2 == pytest.approx(4 * gamma - 1, rel=1e-14)


def test_units_scale_together():
    a = derive_params(3.0, 1, 1.0, 1.0)
    b = derive_params(3.0, 1, 2.0, 2.0)
    assert (a.chi, a.gamma, a.alpha) == (b.chi, b.gamma, b.alpha)


def test_gamma_monotone_in_strength_and_ell():
    assert params_for_gamma(1.0).gamma < params_for_gamma(1.5).gamma
    assert derive_params(10.0, 1).gamma > derive_params(10.0, 2).gamma


def test_params_are_hashable_records():
    assert params_for_gamma(1.0) == params_for_gamma(1.0)
    assert len({params_for_gamma(1.0), params_for_gamma(1.0)}) == 1


@pytest.mark.parametrize("coeff,expected", [(-1.0, True), (-0.4, False), (-0.5, False)])
def test_classical_fall(coeff, expected):
    assert classical_fall_allowed(coeff, 1.0, 1.0) is expected


def test_classical_fall_rejects_bad_mass():
    with pytest.raises(InvalidInput):
        classical_fall_allowed(-1.0, 1.0, 0.0)


@pytest.mark.parametrize("args", [
    (float("nan"), 1.0, 1.0),
    (-1.0, float("inf"), 1.0),
    (-1.0, 1.0, float("-inf")),
])
def test_classical_fall_rejects_non_finite(args):
    with pytest.raises(InvalidInput, match="must be finite"):
        classical_fall_allowed(*args)
