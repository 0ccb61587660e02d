"""Integrals over the self-similar profile and the observables built from them.

All integrals run over [xi_min, xi_max] with adaptive Gauss-Legendre
quadrature; the pieces below xi_min and above xi_max are added from the
small- and large-xi asymptotic forms of R.
"""
import logging
import math

import numpy as np

from qcollapse import specfun
from qcollapse.errors import DomainError, InvalidInput, QuadratureError
from qcollapse.models import CollapseParams, EvalAccuracy, ObservableReport
from qcollapse.profile import closed_form, evaluate_R_and_slope

logger = logging.getLogger(__name__)

DEFAULT_XI_MAX = 30.0
DEFAULT_XI_MIN = 1e-6
DEFAULT_TOL = 1e-10
MIN_XI_MAX = 30.0
DECAY_COEFF = 0.75

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)
_LOG_PANELS_PER_DECADE = 8
_UNIFORM_PANEL_WIDTH = 0.5
_MAX_LEVELS = 40
_TAIL_PANELS = 4

# integrand rows
_NAMES = ("I0", "I1", "I2", "J", "P")


def _gauss_rule(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    half = 0.5 * (b - a)
    x = 0.5 * (a + b)[:, None] + half[:, None] * _GL_NODES
    values = f(x.ravel()).reshape(-1, a.size, _GL_NODES.size)
    return half * (values @ _GL_WEIGHTS)


def adaptive_gauss_legendre(f, edges, tol: float = DEFAULT_TOL, max_levels: int = _MAX_LEVELS):
    """Integrate a vector-valued f over consecutive panels, bisecting where needed.

    f maps a 1-D array of abscissae to an array of shape (k, n). Each panel is
    accepted once the 15-point rule over the whole panel agrees with the sum
    over its halves. Returns the k integrals and their error estimates.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    budget = 4 * a.size
    total = None
    error = None
    scale = None
    for level in range(max_levels):
        mid = 0.5 * (a + b)
        whole = _gauss_rule(f, a, b)
        refined = _gauss_rule(f, a, mid) + _gauss_rule(f, mid, b)
        err = np.abs(refined - whole)
        if scale is None:
            scale = np.maximum(np.abs(refined.sum(axis=1)), np.finfo(float).tiny)
            total = np.zeros(refined.shape[0], dtype=refined.dtype)
            error = np.zeros(refined.shape[0])
        done = np.all(err <= (tol * scale / budget)[:, None], axis=0)
        total += refined[:, done].sum(axis=1)
        error += err[:, done].sum(axis=1)
        if done.all():
            logger.debug(f"Quadrature converged after {level + 1} levels")
            return total, error
        keep = ~done
        a, b = np.concatenate([a[keep], mid[keep]]), np.concatenate([mid[keep], b[keep]])
    raise QuadratureError(f"adaptive quadrature did not converge within {max_levels} bisection levels")


def quadrature_edges(xi_min: float, xi_max: float) -> np.ndarray:
    """Log-graded panels up to xi = 1, uniform panels beyond."""
    decades = math.log10(1.0 / xi_min)
    log_part = np.geomspace(xi_min, 1.0, max(2, int(math.ceil(decades * _LOG_PANELS_PER_DECADE)) + 1))
    n_uniform = max(1, int(math.ceil((xi_max - 1.0) / _UNIFORM_PANEL_WIDTH)))
    return np.concatenate([log_part, np.linspace(1.0, xi_max, n_uniform + 1)[1:]])


def _integrands(params: CollapseParams, acc: EvalAccuracy):
    centrifugal = params.centrifugal

    def f(xi):
        R, dR = evaluate_R_and_slope(params, xi, acc)
        abs2 = R.real ** 2 + R.imag ** 2
        slope2 = dR.real ** 2 + dR.imag ** 2
        cross = np.conj(R) * dR
        xi2 = xi * xi
        return np.stack([abs2 * xi2, abs2 * xi2 * xi, slope2 * xi2 + centrifugal * abs2,
                         cross * xi2 * xi, cross * xi2]).astype(complex)

    return f


def _below_cutoff(params: CollapseParams, xi_min: float) -> np.ndarray:
    """Contributions of (0, xi_min] from the two-power small-xi form of R."""
    cf = closed_form(params)
    amps, mus = (cf.A1, -cf.A2), (cf.mu1, cf.mu2)
    I0 = I1 = J = P = 0j
    for Aj, mj in zip(amps, mus):
        for Ak, mk in zip(amps, mus):
            coeff = Aj.conjugate() * Ak
            e = mj.conjugate() + mk
            I0 += coeff * xi_min ** (e + 3) / (e + 3)
            I1 += coeff * xi_min ** (e + 4) / (e + 4)
            J += coeff * mk * xi_min ** (e + 3) / (e + 3)
            P += coeff * mk * xi_min ** (e + 2) / (e + 2)
    # the kinetic integral diverges at the origin and is reported cut off
    return np.array([I0.real, I1.real, 0.0, J, P], dtype=complex)


def _beyond_cutoff(params: CollapseParams, xi_max: float, tol: float, acc: EvalAccuracy):
    """Contributions of [xi_max, inf) and their error estimates.

    Integrated in u = 1/xi with the full large-xi expansion of R, where every
    integrand is a smooth function of u on (0, 1/xi_max].
    """
    f = _integrands(params, acc)

    def g(u):
        return f(1.0 / u) / (u * u)

    values, errors = adaptive_gauss_legendre(g, np.linspace(0.0, 1.0 / xi_max, _TAIL_PANELS + 1), tol)
    # the tail series is summed to rel_tol
    return values, errors + acc.rel_tol * np.abs(values)


def analytic_norm(params: CollapseParams) -> float:
    """Closed-form norm integral from the probability flux into the origin."""
    cf = closed_form(params)
    return params.alpha / 3.0 * (abs(cf.A1) ** 2 - abs(cf.A2) ** 2)


def kinetic_log_slope(params: CollapseParams) -> float:
    """Coefficient of -ln(xi_min) in the cut-off kinetic integral."""
    cf = closed_form(params)
    return params.beta_tilde * (abs(cf.A1) ** 2 + abs(cf.A2) ** 2)


def radial_moment_integrals(params: CollapseParams, xi_max: float = DEFAULT_XI_MAX, tol: float = DEFAULT_TOL,
                            xi_min: float = DEFAULT_XI_MIN,
                            acc: EvalAccuracy = specfun.DEFAULT_ACCURACY) -> ObservableReport:
    if xi_max < MIN_XI_MAX:
        raise DomainError(f"xi_max must be at least {MIN_XI_MAX}, got {xi_max}")
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not 0 < xi_min < 1:
        raise DomainError(f"xi_min must lie in (0, 1), got {xi_min}")

    values, errors = adaptive_gauss_legendre(_integrands(params, acc), quadrature_edges(xi_min, xi_max), tol)
    tail, tail_errors = _beyond_cutoff(params, xi_max, tol, acc)
    below = _below_cutoff(params, xi_min)
    # the two-power form drops relative corrections of order xi_min**2
    values = values + below + tail
    errors = errors + tail_errors + xi_min ** 2 * np.abs(below)
    relative = errors / np.abs(values)
    for name, rel in zip(_NAMES, relative):
        if rel > tol:
            raise QuadratureError(f"{name}: error estimate {rel:.3g} exceeds tolerance {tol:g}")

    I0, I1, I2 = (float(v.real) for v in values[:3])
    J, P = complex(values[3]), complex(values[4])
    report = ObservableReport(
        params=params, xi_min=xi_min, xi_max=xi_max,
        norm_I0=I0, moment_I1=I1, kinetic_I2=I2, kinetic_log_slope=kinetic_log_slope(params),
        energy_J=J, radial_P=P,
        energy_dimless=abs(J) / I0,
        energy_real_coeff=-J.imag / (2.0 * I0),
        decay_coeff=-J.real / (2.0 * I0),
        quad_error={name: float(err) for name, err in zip(_NAMES, errors)},
    )
    report.C_r, report.C_p = scaling_constants(report)
    logger.info(f"Observables gamma={params.gamma:g}: I0={I0:.12g}, C_r={report.C_r:.12g}, "
                f"C_p={report.C_p:.12g}, E_dimless={report.energy_dimless:.6g}")
    return report


def scaling_constants(report: ObservableReport) -> tuple[float, float]:
    """(C_r, C_p): <r> = C_r sqrt(-chi t), |<p_r>| = hbar C_p / sqrt(-chi t)."""
    if report.norm_I0 is None or report.moment_I1 is None or report.radial_P is None:
        raise InvalidInput("report has no integrals; run radial_moment_integrals first")
    if not report.norm_I0 > 0:
        raise InvalidInput(f"norm integral must be positive, got {report.norm_I0}")
    return report.moment_I1 / report.norm_I0, abs(report.radial_P.imag) / report.norm_I0


def mean_energy(params: CollapseParams, t: float, xi_max: float = DEFAULT_XI_MAX,
                report: ObservableReport | None = None) -> tuple[complex, float]:
    """E = i hbar <Psi|dPsi/dt> / <Psi|Psi> at time t, and |J| / I0."""
    if not t < 0:
        raise DomainError(f"mean energy is defined for t < 0, got t={t}")
    if report is None:
        report = radial_moment_integrals(params, xi_max)
    E = -1j * params.hbar / (2.0 * t) * report.energy_J / report.norm_I0
    return E, report.energy_dimless


def expectations_at_time(report: ObservableReport, t: float) -> tuple[float, float, float]:
    """(<r>, <p>, <r><p>) at time t < 0."""
    if not t < 0:
        raise DomainError(f"expectations are defined for t < 0, got t={t}")
    C_r, C_p = scaling_constants(report)
    params = report.params
    scale = math.sqrt(-params.chi * t)
    return C_r * scale, params.hbar * C_p / scale, params.hbar * C_r * C_p
