"""Crank-Nicolson propagation of the reduced radial wave function u = r R.

Nodes sit at r_j = j dr, j = 1..n_points; u(0) = 0 is implicit and the last
node (r = r_max) is pinned to zero. Two core models are available:

* ``capped``: the -beta/r**2 term is held constant for r < r_core, which keeps
  H Hermitian and the norm conserved;
* ``matched``: nodes with r <= r_core follow the exact self-similar solution,
  so probability can flow into the origin as it does for the exact solution.
"""
import logging
import math

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from qcollapse.errors import DomainError, FitError, HaltedAtCore, InvalidInput, SolverError
from qcollapse.models import (CollapseParams, CoreModel, EvolutionRecord, InitKind, RadialGrid,
                              WavePacketState)
from qcollapse.profile import evaluate_R

logger = logging.getLogger(__name__)

DEFAULT_R_MAX = 40.0
DEFAULT_N_POINTS = 8192
DEFAULT_CORE_FRACTION = 1.0 / 2048.0
DEFAULT_DT = 2.5e-4
DEFAULT_RECORD_EVERY = 100
HALT_CORE_MULTIPLE = 5.0
MIN_FIT_SAMPLES = 8


def make_grid(r_max: float = DEFAULT_R_MAX, n_points: int = DEFAULT_N_POINTS,
              r_core: float | None = None) -> RadialGrid:
    if r_core is None:
        r_core = r_max * DEFAULT_CORE_FRACTION
    try:
        return RadialGrid(r_max=r_max, n_points=n_points, r_core=r_core)
    except ValueError as e:
        raise InvalidInput(str(e)) from e


def effective_potential(grid: RadialGrid, params: CollapseParams) -> np.ndarray:
    """-beta/r**2 capped at r_core plus the unregularised centrifugal term."""
    r = grid.r
    unit = params.hbar ** 2 / (2.0 * params.mass)
    return unit * (params.centrifugal / r ** 2 - params.beta_tilde / np.maximum(r, grid.r_core) ** 2)


def _scale(params: CollapseParams, t: float) -> float:
    return math.sqrt(params.chi * abs(t))


def analytic_u(params: CollapseParams, r: np.ndarray, t: float, kind: InitKind) -> np.ndarray:
    """r R(r / sqrt(chi |t|)), conjugated for the escape solution."""
    if kind == "self_similar" and not t < 0:
        raise DomainError(f"the collapsing solution needs t < 0, got t={t}")
    if kind == "conjugated_self_similar" and not t > 0:
        raise DomainError(f"the escaping solution needs t > 0, got t={t}")
    u = r * np.asarray(evaluate_R(params, r / _scale(params, t)))
    return np.conj(u) if kind == "conjugated_self_similar" else u


def init_state(grid: RadialGrid, params: CollapseParams, kind: InitKind, t0: float = 0.0,
               r0: float | None = None, width: float | None = None, core: CoreModel | None = None,
               potential: np.ndarray | None = None) -> WavePacketState:
    r = grid.r
    if kind == "gaussian":
        if r0 is None or width is None or not 0 < r0 < grid.r_max or not width > 0:
            raise DomainError("gaussian packets need 0 < r0 < r_max and width > 0")
        if core == "matched":
            raise DomainError("the matched core follows the analytic solution; use it with analytic kinds")
        u = r * np.exp(-((r - r0) ** 2) / (2.0 * width ** 2)) + 0j
    else:
        if _scale(params, t0) > grid.r_max / 8.0:
            raise DomainError(f"packet scale sqrt(chi |t0|) = {_scale(params, t0):.4g} exceeds r_max/8")
        u = analytic_u(params, r, t0, kind)
    u[-1] = 0.0

    norm = math.sqrt(float(np.sum(np.abs(u) ** 2)) * grid.dr)
    u = u / norm
    if potential is None:
        potential = effective_potential(grid, params)
    state = WavePacketState(grid=grid, u=u, t=t0, params=params, potential=np.asarray(potential, dtype=float),
                            core=core or ("capped" if kind == "gaussian" else "matched"), kind=kind,
                            amplitude=1.0 / norm)
    logger.debug(f"Initialised {kind} state at t={t0:g} on {grid.n_points} nodes ({state.core} core)")
    return state


def _pinned_count(state: WavePacketState) -> int:
    if state.core != "matched":
        return 0
    return int(np.count_nonzero(state.grid.r <= state.grid.r_core))


def step_crank_nicolson(state: WavePacketState, dt: float) -> WavePacketState:
    """Advance state in place by one Crank-Nicolson step of length dt."""
    if dt == 0 or not math.isfinite(dt):
        raise DomainError(f"dt must be finite and non-zero, got {dt}")
    grid, params = state.grid, state.params
    kinetic = params.hbar ** 2 / (params.mass * grid.dr ** 2)
    diag = kinetic + state.potential
    off = -0.5 * kinetic
    c = 0.5j * dt / params.hbar

    u = state.u
    Hu = diag * u
    Hu[1:] += off * u[:-1]
    Hu[:-1] += off * u[1:]
    rhs = u - c * Hu

    k = _pinned_count(state)
    t_new = state.t + dt
    u_new = np.zeros_like(u)
    if k:
        u_new[:k] = state.amplitude * analytic_u(params, grid.r[:k], t_new, state.kind)

    free = slice(k, grid.n_points - 1)
    m = grid.n_points - 1 - k
    ab = np.empty((3, m), dtype=complex)
    ab[0, 0] = ab[2, -1] = 0.0
    ab[0, 1:] = c * off
    ab[1] = 1.0 + c * diag[free]
    ab[2, :-1] = c * off
    b = rhs[free].copy()
    if k:
        b[0] -= c * off * u_new[k - 1]
    try:
        u_new[free] = solve_banded((1, 1), ab, b, check_finite=False)
    except (LinAlgError, ValueError) as e:
        raise SolverError(f"tridiagonal solve failed at t={state.t:g}: {e}") from e
    if not np.all(np.isfinite(u_new)):
        raise SolverError(f"non-finite wave function after step at t={state.t:g}")

    state.u = u_new
    state.t = t_new
    return state


def _measure(state: WavePacketState) -> tuple[float, float, float, float]:
    r = state.grid.r
    density = np.abs(state.u) ** 2
    mass = float(np.sum(density))
    norm = mass * state.grid.dr
    r_mean = float(np.sum(r * density) / mass)
    r2_mean = float(np.sum(r * r * density) / mass)
    spread = math.sqrt(max(r2_mean - r_mean ** 2, 0.0))
    if state.kind == "gaussian":
        return norm, r_mean, spread, float("nan")
    return norm, r_mean, spread, fidelity(state.u, analytic_u(state.params, r, state.t, state.kind))


def fidelity(u1: np.ndarray, u2: np.ndarray) -> float:
    """|<u1|u2>|**2 / (<u1|u1><u2|u2>)."""
    overlap = np.vdot(u1, u2)
    return float(abs(overlap) ** 2 / (np.vdot(u1, u1).real * np.vdot(u2, u2).real))


def evolve_and_record(state: WavePacketState, t_end: float, dt: float = DEFAULT_DT,
                      record_every: int = DEFAULT_RECORD_EVERY) -> EvolutionRecord:
    """Step state towards t_end, measuring every record_every steps.

    Only the magnitude of dt is used; the direction follows t_end. The last step
    is shortened so that the run ends exactly at t_end.

    Raises HaltedAtCore, with the record so far attached, once <r> drops below
    five core radii.
    """
    if record_every < 1:
        raise DomainError("record_every must be at least 1")
    if dt == 0 or t_end == state.t:
        raise DomainError(f"t_end={t_end} is not reachable from t={state.t} with dt={dt}")
    dt = math.copysign(abs(dt), t_end - state.t)
    n_steps = max(1, math.ceil((t_end - state.t) / dt - 1e-9))
    halt_radius = HALT_CORE_MULTIPLE * state.grid.r_core
    logger.info(f"Evolving {state.kind} state: t={state.t:g} -> {t_end:g}, {n_steps} steps of {dt:g}")

    times, norms, r_means, spreads, overlaps = [], [], [], [], []

    def record() -> EvolutionRecord:
        return EvolutionRecord(times=times, norms=norms, r_means=r_means, r_spreads=spreads, overlaps=overlaps)

    for step in range(n_steps + 1):
        if step % record_every == 0 or step == n_steps:
            norm, r_mean, spread, fid = _measure(state)
            times.append(state.t)
            norms.append(norm)
            r_means.append(r_mean)
            spreads.append(spread)
            overlaps.append(fid)
            logger.debug(f"t={state.t:.6g} norm={norm:.12g} <r>={r_mean:.8g} fidelity={fid:.8g}")
            if r_mean < halt_radius:
                raise HaltedAtCore(f"<r> = {r_mean:.4g} reached {HALT_CORE_MULTIPLE:g} core radii at t={state.t:g}",
                                   record=record())
        if step < n_steps - 1:
            step_crank_nicolson(state, dt)
        elif step == n_steps - 1:
            step_crank_nicolson(state, t_end - state.t)
            state.t = t_end
    logger.info(f"Evolution finished at t={state.t:g}: <r>={r_means[-1]:.8g}, norm={norms[-1]:.12g}")
    return record()


def fit_power_law(times, values) -> tuple[float, float, float]:
    """Least-squares fit of values = prefactor * |t|**exponent on log-log axes.

    Returns (exponent, prefactor, r_squared).
    """
    t = np.abs(np.asarray(times, dtype=float))
    v = np.asarray(values, dtype=float)
    if t.size != v.size or t.size < MIN_FIT_SAMPLES:
        raise FitError(f"power-law fit needs at least {MIN_FIT_SAMPLES} paired samples, got {t.size}")
    if np.any(v <= 0) or np.any(t == 0) or not np.all(np.isfinite(v)):
        raise FitError("power-law fit needs positive values and non-zero times")
    x, y = np.log(t), np.log(v)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise FitError("degenerate series: times or values are constant")
    exponent, intercept = np.polyfit(x, y, 1)
    residual = y - (exponent * x + intercept)
    r_squared = 1.0 - float(np.sum(residual ** 2)) / float(np.sum((y - y.mean()) ** 2))
    return float(exponent), float(math.exp(intercept)), r_squared


def richardson_order(coarse: float, medium: float, fine: float) -> float:
    """Observed convergence order from three solutions with halving resolution."""
    upper, lower = abs(coarse - medium), abs(medium - fine)
    if lower == 0 or upper == 0:
        raise FitError("Richardson triple is degenerate")
    return math.log2(upper / lower)
