"""Problem constants, unit conventions and validity predicates.

The potential strength enters in dimensionless form, beta_tilde = 2*m*beta/hbar**2,
which makes gamma = beta_tilde - ell*(ell+1) consistent with the radial
self-similar equation for any hbar and m.
"""
import logging
import math

from pydantic import ValidationError as PydanticValidationError

from qcollapse.errors import FallConditionViolated, InvalidInput
from qcollapse.models import CollapseParams

logger = logging.getLogger(__name__)

DEFAULT_HBAR = 1.0
DEFAULT_MASS = 1.0
NU = 0.5
FALL_THRESHOLD = 0.25


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidInput(f"{name} must be finite, got {value!r}")


def derive_params(beta_tilde: float, ell: int = 0,
                  hbar: float = DEFAULT_HBAR, mass: float = DEFAULT_MASS) -> CollapseParams:
    _require_finite(beta_tilde=beta_tilde, hbar=hbar, mass=mass)
    if int(ell) != ell or ell < 0:
        raise InvalidInput(f"ell must be a non-negative integer, got {ell!r}")
    if hbar <= 0 or mass <= 0:
        raise InvalidInput(f"hbar and mass must be positive (hbar={hbar}, mass={mass})")

    ell = int(ell)
    gamma = beta_tilde - ell * (ell + 1)
    if gamma <= FALL_THRESHOLD:
        raise FallConditionViolated(
            f"gamma = beta_tilde - ell(ell+1) = {gamma:g} must satisfy gamma > 1/4 "
            "for a collapsing solution to exist"
        )
    alpha = math.sqrt(4.0 * gamma - 1.0)
    try:
        params = CollapseParams(beta_tilde=beta_tilde, ell=ell, hbar=hbar, mass=mass,
                                chi=hbar / mass, gamma=gamma, alpha=alpha, nu=NU)
    except PydanticValidationError as e:
        raise InvalidInput(str(e)) from e
    logger.debug(f"Derived params: gamma={gamma:.17g}, alpha={alpha:.17g}, chi={params.chi:.17g}")
    return params


def params_for_gamma(gamma: float, hbar: float = DEFAULT_HBAR, mass: float = DEFAULT_MASS) -> CollapseParams:
    """Shortcut for the s-wave problem, where beta_tilde equals gamma."""
    return derive_params(gamma, 0, hbar, mass)


def classical_fall_allowed(limit_coeff: float, angular_momentum: float, mass: float) -> bool:
    """True iff r**2 U(r) -> limit_coeff lets a classical particle reach the origin."""
    _require_finite(limit_coeff=limit_coeff, angular_momentum=angular_momentum, mass=mass)
    if mass <= 0:
        raise InvalidInput(f"mass must be positive, got {mass}")
    return limit_coeff < -angular_momentum ** 2 / (2.0 * mass)
