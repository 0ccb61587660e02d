"""The self-similar radial profile R(xi) and its asymptotics.

R(xi) = A1 xi**mu1 M(a1; b1; z) - A2 xi**mu2 M(a2; b2; z),   z = -i xi**2 / 2,

with mu1,2 = -1/2 -+ i alpha/2, a1,2 = mu1,2 / 2, b1,2 = mu1,2 + 3/2 and the
normalisation constant C fixed to 1. Only the principal branch (n = 0) of the
imaginary powers is used.

Both Kummer terms share one large-|z| sector series and their algebraic
sectors cancel exactly, so beyond the switch xi**2 > 2 * asymptotic_threshold

R(xi) = C_inf xi**-3 exp(-i xi**2 / 2) S(z),   S(z) = sum_s (p)_s (conj p)_s / (s! z**s),

with p = (5 + i alpha) / 4.
"""
import cmath
import logging
import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from qcollapse import specfun
from qcollapse.errors import ConvergenceError, DomainError, FitError
from qcollapse.models import CollapseParams, EvalAccuracy, ProfileTable

logger = logging.getLogger(__name__)

TAIL_FIT_MIN_XI = 15.0
TAIL_FIT_MAX_SPREAD = 0.10
DEFAULT_TAIL_WINDOW = (20.0, 30.0)


class ClosedForm(NamedTuple):
    alpha: float
    mu1: complex
    mu2: complex
    a1: complex
    b1: complex
    a2: complex
    b2: complex
    A1: complex
    A2: complex
    C_infinity: complex
    p: complex


class TailFit(NamedTuple):
    constant: complex
    spread: float


@lru_cache(maxsize=64)
def closed_form(params: CollapseParams) -> ClosedForm:
    """Prefactors of the closed form, assembled from log-Gamma values."""
    alpha = params.alpha
    half = 0.5j * alpha
    mu1, mu2 = -0.5 - half, -0.5 + half
    a1, b1 = 0.5 * mu1, mu1 + 1.5
    a2, b2 = 0.5 * mu2, mu2 + 1.5
    lg = specfun.complex_log_gamma

    log_A1 = half * math.log(2.0) + lg(1.0 + half) + lg((5.0 - 1j * alpha) / 4.0)
    log_A2 = -math.pi * alpha / 4.0 + lg(1.0 - half) + lg((5.0 + 1j * alpha) / 4.0)

    def sector_constant(log_A, a, b):
        # Gamma(a) = Gamma(a + 1) / a keeps log-Gamma in the right half plane
        log_ratio = lg(b) - lg(a + 1.0) + cmath.log(a)
        return cmath.exp(log_A + log_ratio + (a - b) * (-math.log(2.0) - 0.5j * math.pi))

    C_infinity = sector_constant(log_A1, a1, b1) - sector_constant(log_A2, a2, b2)
    return ClosedForm(alpha, mu1, mu2, a1, b1, a2, b2, cmath.exp(log_A1), cmath.exp(log_A2),
                      C_infinity, (5.0 + 1j * alpha) / 4.0)


def tail_constant(params: CollapseParams) -> complex:
    return closed_form(params).C_infinity


def majorant_constant(params: CollapseParams) -> float:
    """C0 with |R|**2 <= C0 / xi to leading order as xi -> 0."""
    cf = closed_form(params)
    return (abs(cf.A1) + abs(cf.A2)) ** 2


def small_xi_monotone(params: CollapseParams) -> bool:
    """Whether the leading small-xi form of |R|**2 is non-increasing."""
    alpha = params.alpha
    return math.cosh(math.pi * alpha / 4.0) > math.sqrt(1.0 + alpha * alpha)


def imaginary_power(z: float, alpha: float, n: int = 0, sign: int = 1) -> complex:
    """Branch n of z**(sign * i alpha / 2) for real z > 0."""
    if not z > 0:
        raise DomainError(f"imaginary_power needs z > 0, got {z}")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    phase = 0.5 * alpha * math.log(z)
    return math.exp(-sign * math.pi * alpha * n) * complex(math.cos(phase), sign * math.sin(phase))


def _check_xi(xi) -> tuple[np.ndarray, bool]:
    arr = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("xi must be finite and positive")
    return np.atleast_1d(arr), arr.ndim == 0


def _tail_series(p: complex, z: np.ndarray, acc: EvalAccuracy, order: int):
    """S(z) and, for order >= 1, 2, its first and second derivatives."""
    q = p.conjugate()
    term = np.ones_like(z)
    sums = [np.ones_like(z), np.zeros_like(z), np.zeros_like(z)]
    active = np.ones(z.shape, dtype=bool)
    for s in range(acc.max_terms):
        nxt = term * (p + s) * (q + s) / ((s + 1) * z)
        active &= (np.abs(nxt) < np.abs(term)) & (np.abs(term) > 1e-3 * acc.rel_tol * np.abs(sums[0]))
        if not active.any():
            break
        k = s + 1
        sums[0] = np.where(active, sums[0] + nxt, sums[0])
        if order >= 1:
            sums[1] = np.where(active, sums[1] - k * nxt / z, sums[1])
        if order >= 2:
            sums[2] = np.where(active, sums[2] + k * (k + 1) * nxt / (z * z), sums[2])
        term = np.where(active, nxt, term)
    return sums


def _large_xi(params: CollapseParams, xi: np.ndarray, acc: EvalAccuracy, order: int):
    cf = closed_form(params)
    z = -0.5j * xi * xi
    S, dS, d2S = _tail_series(cf.p, z, acc, order)
    P = cf.C_infinity * np.exp(-0.5j * xi * xi) / xi ** 3
    R = P * S
    if order == 0:
        return R, None, None
    L = -3.0 / xi - 1j * xi
    dQ = -1j * xi * dS
    dR = P * (L * S + dQ)
    d2Q = -xi * xi * d2S - 1j * dS
    d2R = P * ((L * L + 3.0 / xi ** 2 - 1j) * S + 2.0 * L * dQ + d2Q)
    return R, dR, d2R


def _closed_form_terms(params: CollapseParams, xi: np.ndarray, acc: EvalAccuracy, order: int):
    cf = closed_form(params)
    z = -0.5j * xi * xi
    c = -0.5j
    log_xi = np.log(xi)
    R = np.zeros_like(z)
    dR = np.zeros_like(z)
    d2R = np.zeros_like(z)
    for sign, A, mu, a, b in ((1.0, cf.A1, cf.mu1, cf.a1, cf.b1), (-1.0, cf.A2, cf.mu2, cf.a2, cf.b2)):
        power = sign * A * np.exp(mu * log_xi)
        F = np.asarray(specfun.kummer_1f1(a, b, z, acc))
        R += power * F
        if order == 0:
            continue
        dF = np.asarray(specfun.kummer_1f1_derivative(a, b, z, acc))
        dR += power / xi * (mu * F + 2.0 * c * xi * xi * dF)
        if order == 1:
            continue
        d2F = np.asarray(specfun.kummer_1f1_second_derivative(a, b, z, acc))
        d2R += power / (xi * xi) * (mu * (mu - 1.0) * F + (4.0 * c * mu + 2.0 * c) * xi * xi * dF
                                    + 4.0 * c * c * xi ** 4 * d2F)
    if order == 0:
        return R, None, None
    return R, dR, (d2R if order >= 2 else None)


def _evaluate(params: CollapseParams, xi, acc: EvalAccuracy, order: int):
    arr, scalar = _check_xi(xi)
    large = arr * arr > 2.0 * acc.asymptotic_threshold
    out = [np.zeros(arr.shape, dtype=complex) for _ in range(3)]
    for mask, method in ((~large, _closed_form_terms), (large, _large_xi)):
        if mask.any():
            parts = method(params, arr[mask], acc, order)
            for target, part in zip(out, parts):
                if part is not None:
                    target[mask] = part
    if scalar:
        out = [complex(v[0]) for v in out]
    return out


def evaluate_R(params: CollapseParams, xi, acc: EvalAccuracy = specfun.DEFAULT_ACCURACY):
    return _evaluate(params, xi, acc, 0)[0]


def evaluate_R_and_slope(params: CollapseParams, xi, acc: EvalAccuracy = specfun.DEFAULT_ACCURACY):
    R, dR, _ = _evaluate(params, xi, acc, 1)
    return R, dR


def evaluate_R_derivatives(params: CollapseParams, xi, acc: EvalAccuracy = specfun.DEFAULT_ACCURACY):
    """(R, dR/dxi, d2R/dxi2), differentiated analytically."""
    R, dR, d2R = _evaluate(params, xi, acc, 2)
    return R, dR, d2R


def ode_residual(params: CollapseParams, xi, acc: EvalAccuracy = specfun.DEFAULT_ACCURACY):
    """Normalised residual of R'' + (2/xi + i xi) R' + gamma R / xi**2 = 0."""
    R, dR, d2R = (np.asarray(v) for v in evaluate_R_derivatives(params, xi, acc))
    x = np.asarray(xi, dtype=float)
    first = (2.0 / x + 1j * x) * dR
    zeroth = params.gamma * R / x ** 2
    value = np.abs(d2R + first + zeroth) / (np.abs(d2R) + np.abs(first) + np.abs(zeroth))
    return float(value) if value.ndim == 0 else value


def small_xi_asymptote(params: CollapseParams, xi):
    arr, scalar = _check_xi(xi)
    cf = closed_form(params)
    log_xi = np.log(arr)
    value = cf.A1 * np.exp(cf.mu1 * log_xi) - cf.A2 * np.exp(cf.mu2 * log_xi)
    return complex(value[0]) if scalar else value


def large_xi_tail_fit(params: CollapseParams, fit_window=DEFAULT_TAIL_WINDOW, n_samples: int = 64,
                      acc: EvalAccuracy = specfun.DEFAULT_ACCURACY) -> TailFit:
    """Constant term of R xi**3 exp(+i xi**2 / 2) over the window.

    The samples are fitted by least squares to c0 + c1 / xi**2, which absorbs the
    first correction of the tail series; spread is measured about c0.
    """
    xi_lo, xi_hi = fit_window
    if xi_lo < TAIL_FIT_MIN_XI or not xi_hi > xi_lo:
        raise DomainError(f"tail fit window must satisfy {TAIL_FIT_MIN_XI} <= xi_lo < xi_hi")
    xi = np.linspace(xi_lo, xi_hi, n_samples)
    samples = np.asarray(evaluate_R(params, xi, acc)) * xi ** 3 * np.exp(0.5j * xi * xi)
    design = np.column_stack([np.ones_like(xi), xi ** -2.0])
    coeffs = np.linalg.lstsq(design, samples, rcond=None)[0]
    constant = complex(coeffs[0])
    spread = float(np.max(np.abs(samples - constant)) / abs(constant))
    if spread > TAIL_FIT_MAX_SPREAD:
        raise FitError(f"tail samples spread {spread:.3g} over [{xi_lo}, {xi_hi}]; move the window out")
    logger.debug(f"Tail fit gamma={params.gamma:g}: C_inf={constant:.10g}, spread={spread:.3g}")
    return TailFit(constant, spread)


def psi_value(params: CollapseParams, r, t: float, acc: EvalAccuracy = specfun.DEFAULT_ACCURACY):
    """Radial factor of Psi at (r, t < 0); the unit-normalised Y_lm is factored out."""
    if not t < 0:
        raise DomainError(f"the collapsing solution exists for t < 0, got t={t}")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise DomainError("r must be positive")
    return evaluate_R(params, r_arr / math.sqrt(-params.chi * t), acc)


def build_profile_table(params: CollapseParams, xi, acc: EvalAccuracy = specfun.DEFAULT_ACCURACY) -> ProfileTable:
    xi = np.asarray(xi, dtype=float)
    R, dR, d2R = evaluate_R_derivatives(params, xi, acc)
    R, dR, d2R = np.atleast_1d(R), np.atleast_1d(dR), np.atleast_1d(d2R)
    table = ProfileTable(params=params, xi=np.atleast_1d(xi), R=R, dR=dR, d2R=d2R,
                         abs2=R.real ** 2 + R.imag ** 2, C_infinity=tail_constant(params),
                         C_zero=majorant_constant(params))
    logger.info(f"Built profile table: gamma={params.gamma:g}, {xi.size} nodes on [{xi.min():g}, {xi.max():g}]")
    return table


def integrate_inward(params: CollapseParams, xi_eval, xi_start: float = 30.0, rtol: float = 1e-12,
                     acc: EvalAccuracy = specfun.DEFAULT_ACCURACY) -> np.ndarray:
    """R on xi_eval from integrating the profile ODE inwards from xi_start.

    Initial data come from the large-xi expansion, so the result is independent
    of the Kummer-function evaluation of the closed form.
    """
    xi_eval = np.sort(np.asarray(xi_eval, dtype=float))[::-1]
    if xi_eval[0] > xi_start or xi_eval[-1] <= 0:
        raise DomainError("evaluation points must lie in (0, xi_start]")
    start = _large_xi(params, np.array([xi_start]), acc, 1)
    gamma = params.gamma

    def rhs(x, y):
        return [y[1], -(2.0 / x + 1j * x) * y[1] - gamma * y[0] / (x * x)]

    sol = solve_ivp(rhs, (xi_start, xi_eval[-1]), [start[0][0], start[1][0]], method="DOP853",
                    t_eval=xi_eval, rtol=rtol, atol=1e-14 * abs(start[0][0]))
    if not sol.success:
        raise ConvergenceError(f"inward integration failed: {sol.message}")
    return sol.y[0][::-1]
