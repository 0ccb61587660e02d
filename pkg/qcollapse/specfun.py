"""Complex Gamma, log-Gamma and Kummer's confluent hypergeometric function.

All functions accept Python scalars or numpy arrays (broadcast together) and
return a Python complex for scalar input, a complex ndarray otherwise.

Kummer's function M(a; b; z) = 1F1(a; b; z) is evaluated in three regimes of |z|:

* ``|z| <= series_threshold``: the defining power series with Neumaier
  compensated summation;
* ``series_threshold < |z| <= asymptotic_threshold``: the series value and
  derivative at ``|z| = series_threshold`` on the same ray, carried outwards by
  Taylor re-expansion of Kummer's equation z w'' + (b - z) w' - a w = 0 with
  steps of half the distance to the singular point z = 0;
* ``|z| > asymptotic_threshold``: the two-sector large-|z| expansion truncated
  at its smallest term.

Below the asymptotic band, arguments with Re z < 0 are evaluated through Kummer's
transformation M(a; b; z) = exp(z) M(b - a; b; -z).

The direct series at purely imaginary |z| = 40 loses about 14 digits to
cancellation.
"""
import logging
import math

import numpy as np

from qcollapse.errors import ConvergenceError, DomainError, GammaOverflowError, PoleError
from qcollapse.models import EvalAccuracy

logger = logging.getLogger(__name__)

DEFAULT_ACCURACY = EvalAccuracy()

# Lanczos g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# B_2k / (2k (2k - 1)) for the Stirling series of log Gamma
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN_RE = 15.0

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_TAYLOR_MAX_TERMS = 400
_TAYLOR_TOL = 1e-17


def _as_complex(*values):
    arrays = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in values))
    scalar = all(np.ndim(v) == 0 for v in values)
    return [np.array(arr, dtype=complex) for arr in arrays], scalar


def _output(value: np.ndarray, scalar: bool):
    if scalar:
        return complex(value.reshape(()))
    return value


def _nonpositive_integer(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _lanczos(z: np.ndarray) -> np.ndarray:
    """Gamma(z) for Re z >= 0.5."""
    z = z - 1.0
    x = np.full_like(z, _LANCZOS_COEFFS[0])
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        x = x + coeff / (z + i)
    t = z + _LANCZOS_G + 0.5
    return np.exp(_HALF_LOG_2PI + (z + 0.5) * np.log(t) - t) * x


def complex_gamma(z):
    (z,), scalar = _as_complex(z)
    if np.any(_nonpositive_integer(z)):
        raise PoleError(f"Gamma has a pole at {z[_nonpositive_integer(z)].ravel()[0]}")

    reflect = z.real < 0.5
    with np.errstate(over="ignore", invalid="ignore"):
        base = _lanczos(np.where(reflect, 1.0 - z, z))
        value = np.where(reflect, np.pi / (np.sin(np.pi * z) * base), base)
    if not np.all(np.isfinite(value)):
        raise GammaOverflowError("|Gamma(z)| exceeds the double range; use complex_log_gamma")
    return _output(value, scalar)


def reciprocal_gamma(z):
    """1/Gamma(z), zero at the poles of Gamma."""
    (z,), scalar = _as_complex(z)
    poles = _nonpositive_integer(z)
    safe = np.where(poles, 1.0, z)
    value = np.where(poles, 0.0, 1.0 / np.asarray(complex_gamma(safe)))
    return _output(value, scalar)


def complex_log_gamma(z):
    """Principal branch of log Gamma(z) for Re z > 0 (Stirling series after upward shift)."""
    (z,), scalar = _as_complex(z)
    if np.any(z.real <= 0):
        raise DomainError("complex_log_gamma requires Re(z) > 0")

    shifts = np.maximum(0, np.ceil(_STIRLING_MIN_RE - z.real)).astype(int)
    w = z + shifts
    correction = np.zeros_like(z)
    for k in range(int(shifts.max(initial=0))):
        active = k < shifts
        correction = correction + np.where(active, np.log(np.where(active, z + k, 1.0)), 0.0)

    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    power = inv
    for coeff in _STIRLING_COEFFS:
        series = series + coeff * power
        power = power * inv2
    value = (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series - correction
    return _output(value, scalar)


class _Neumaier:
    """Compensated running sum, applied to the real and imaginary parts separately."""

    def __init__(self, shape):
        self.re = np.ones(shape)
        self.im = np.zeros(shape)
        self.c_re = np.zeros(shape)
        self.c_im = np.zeros(shape)

    @staticmethod
    def _add(s, c, x):
        t = s + x
        big = np.abs(s) >= np.abs(x)
        c = c + np.where(big, (s - t) + x, (x - t) + s)
        return t, c

    def add(self, term: np.ndarray) -> None:
        self.re, self.c_re = self._add(self.re, self.c_re, term.real)
        self.im, self.c_im = self._add(self.im, self.c_im, term.imag)

    @property
    def value(self) -> np.ndarray:
        return (self.re + self.c_re) + 1j * (self.im + self.c_im)


def _series(a, b, z, acc: EvalAccuracy) -> np.ndarray:
    total = _Neumaier(z.shape)
    term = np.ones_like(z)
    quiet = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    for k in range(acc.max_terms):
        term = np.where(active, term * (a + k) * z / ((b + k) * (k + 1)), 0.0)
        total.add(term)
        small = np.abs(term) <= acc.rel_tol * np.abs(total.value)
        quiet = np.where(small, quiet + 1, 0)
        active &= quiet < 3
        if not active.any():
            return total.value
    raise ConvergenceError(f"1F1 series did not converge within {acc.max_terms} terms")


def _taylor_step(a, b, c, h, w, dw):
    """Value and derivative of the Kummer solution at c + h from (w, dw) at c."""
    t_prev, t_curr = w, dw * h
    value = w + t_curr
    deriv = dw.copy()
    quiet = np.zeros(c.shape, dtype=int)
    for n in range(_TAYLOR_MAX_TERMS):
        t_next = (-(n + 1) * (n + b - c) * t_curr * h + (n + a) * t_prev * h * h) / (c * (n + 2) * (n + 1))
        value = value + t_next
        deriv = deriv + (n + 2) * t_next / h
        scale = np.abs(value) + np.abs(h * deriv)
        quiet = np.where(np.abs(t_next) <= _TAYLOR_TOL * scale, quiet + 1, 0)
        if np.all(quiet >= 3):
            return value, deriv
        t_prev, t_curr = t_curr, t_next
    raise ConvergenceError("Taylor continuation of 1F1 did not converge")


def _continuation(a, b, z, acc: EvalAccuracy) -> np.ndarray:
    radius = np.abs(z)
    point = z * (acc.series_threshold / radius)
    w = _series(a, b, point, acc)
    dw = a / b * _series(a + 1.0, b + 1.0, point, acc)

    while True:
        remaining = z - point
        dist = np.abs(remaining)
        moving = dist > 0
        if not moving.any():
            return w
        reach = 0.5 * np.abs(point)
        h = np.where(dist > reach, remaining * (reach / np.where(moving, dist, 1.0)), remaining)
        idx = np.nonzero(moving)
        w_new, dw_new = _taylor_step(a[idx], b[idx], point[idx], h[idx], w[idx], dw[idx])
        w[idx], dw[idx] = w_new, dw_new
        point[idx] = np.where(dist[idx] > reach[idx], point[idx] + h[idx], z[idx])


def _sector_sum(p, q, x, acc: EvalAccuracy) -> np.ndarray:
    """Sum_s (p)_s (q)_s / (s! x^s), truncated at its smallest term."""
    total = np.ones_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for s in range(acc.max_terms):
        nxt = term * (p + s) * (q + s) / ((s + 1) * x)
        growing = np.abs(nxt) >= np.abs(term)
        active &= ~growing & (np.abs(term) > 1e-3 * acc.rel_tol * np.abs(total))
        if not active.any():
            return total
        total = np.where(active, total + nxt, total)
        term = np.where(active, nxt, term)
    return total


def _asymptotic(a, b, z, acc: EvalAccuracy) -> np.ndarray:
    log_z = np.log(z)
    upper = np.angle(z) > -0.5 * np.pi
    phase = np.exp(np.where(upper, 1j, -1j) * np.pi * a)
    s1 = _sector_sum(1.0 - a, b - a, z, acc)
    s2 = _sector_sum(a, a - b + 1.0, -z, acc)
    sector1 = np.exp(z + (a - b) * log_z) * np.asarray(reciprocal_gamma(a)) * s1
    sector2 = phase * np.exp(-a * log_z) * np.asarray(reciprocal_gamma(b - a)) * s2
    return np.asarray(complex_gamma(b)) * (sector1 + sector2)


def kummer_1f1(a, b, z, acc: EvalAccuracy = DEFAULT_ACCURACY):
    (a, b, z), scalar = _as_complex(a, b, z)
    if np.any(_nonpositive_integer(b)):
        raise DomainError("1F1 is undefined for b at a non-positive integer")
    if not np.all(np.isfinite(z)):
        raise DomainError("1F1 requires a finite argument")

    radius = np.abs(z)
    # M(a; b; z) = exp(z) M(b - a; b; -z) moves left-half-plane arguments to Re z >= 0
    flip = (z.real < 0) & (radius <= acc.asymptotic_threshold)
    a_eval = np.where(flip, b - a, a)
    z_eval = np.where(flip, -z, z)
    result = np.ones_like(z)
    regimes = (
        ((radius > 0) & (radius <= acc.series_threshold), _series),
        ((radius > acc.series_threshold) & (radius <= acc.asymptotic_threshold), _continuation),
        (radius > acc.asymptotic_threshold, _asymptotic),
    )
    with np.errstate(over="ignore", invalid="ignore"):
        for mask, method in regimes:
            if mask.any():
                result[mask] = method(a_eval[mask], b[mask], z_eval[mask], acc)
        result = np.where(flip, np.exp(z) * result, result)
    if not np.all(np.isfinite(result)):
        raise ConvergenceError("1F1 value is not representable in double precision")
    return _output(result, scalar)


def kummer_1f1_derivative(a, b, z, acc: EvalAccuracy = DEFAULT_ACCURACY):
    """d/dz 1F1(a; b; z) = (a/b) 1F1(a+1; b+1; z)."""
    (a, b, z), scalar = _as_complex(a, b, z)
    if np.any(b == 0):
        raise DomainError("1F1 derivative requires b != 0")
    value = a / b * np.asarray(kummer_1f1(a + 1.0, b + 1.0, z, acc))
    return _output(value, scalar)


def kummer_1f1_second_derivative(a, b, z, acc: EvalAccuracy = DEFAULT_ACCURACY):
    (a, b, z), scalar = _as_complex(a, b, z)
    if np.any((b == 0) | (b == -1)):
        raise DomainError("1F1 second derivative requires b not in {0, -1}")
    value = a * (a + 1.0) / (b * (b + 1.0)) * np.asarray(kummer_1f1(a + 2.0, b + 2.0, z, acc))
    return _output(value, scalar)
