import math

import numpy as np
import pytest

from qcollapse import observables, tdse
from qcollapse.errors import DomainError, FitError, HaltedAtCore, InvalidInput
from qcollapse.params import derive_params, params_for_gamma


def gaussian_state(params, r_max=20.0, n_points=1024, r0=5.0, width=1.0, potential=None):
    grid = tdse.make_grid(r_max, n_points)
    return tdse.init_state(grid, params, "gaussian", r0=r0, width=width, potential=potential)


class TestGrid:
    def test_nodes(self):
        grid = tdse.make_grid(40.0, 8192)
        assert grid.dr == 40.0 / 8192
        assert grid.r[0] == grid.dr and grid.r[-1] == pytest.approx(40.0)
        assert grid.r_core == 40.0 / 2048

    @pytest.mark.parametrize("kwargs", [dict(n_points=100), dict(r_core=1.0), dict(r_core=0.0)])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInput):
            tdse.make_grid(40.0, **{"n_points": 1024, **kwargs})


class TestPotential:
    def test_inverse_square_outside_core(self, unit_params):
        grid = tdse.make_grid(40.0, 8192)
        V = tdse.effective_potential(grid, unit_params)
        outside = grid.r > 10 * grid.r_core
        np.testing.assert_allclose(V[outside], -0.5 / grid.r[outside] ** 2, rtol=1e-14)

    def test_capped_inside_core(self, unit_params):
        grid = tdse.make_grid(40.0, 1024, r_core=0.3)
        V = tdse.effective_potential(grid, unit_params)
        inside = grid.r < grid.r_core
        assert inside.sum() > 1
        assert np.all(V[inside] == V[0])

    def test_centrifugal_not_regularised(self):
        p = derive_params(6.5, 2)
        grid = tdse.make_grid(40.0, 1024, r_core=0.3)
        V = tdse.effective_potential(grid, p)
        r = grid.r[0]
        assert V[0] == pytest.approx(0.5 * (6.0 / r ** 2 - 6.5 / 0.3 ** 2), rel=1e-14)


class TestInitialState:
    def test_gaussian_normalised(self, unit_params):
        state = gaussian_state(unit_params)
        assert state.norm == pytest.approx(1.0, rel=1e-14)
        assert state.u[-1] == 0
        assert state.core == "capped"

    def test_conjugated_mirrors_collapse(self, unit_params):
        grid = tdse.make_grid(40.0, 2048)
        collapse = tdse.init_state(grid, unit_params, "self_similar", t0=-1.0)
        escape = tdse.init_state(grid, unit_params, "conjugated_self_similar", t0=1.0)
        np.testing.assert_allclose(escape.u, np.conj(collapse.u), rtol=0, atol=1e-15)
        assert collapse.core == escape.core == "matched"

    def test_self_similar_mean_radius(self, unit_params):
        grid = tdse.make_grid()
        state = tdse.init_state(grid, unit_params, "self_similar", t0=-1.0)
        report = observables.radial_moment_integrals(unit_params)
        r_mean = float(np.sum(grid.r * np.abs(state.u) ** 2) / np.sum(np.abs(state.u) ** 2))
        assert r_mean == pytest.approx(report.C_r * math.sqrt(unit_params.chi), rel=1e-2)

    @pytest.mark.parametrize("kind,kwargs", [
        ("self_similar", dict(t0=1.0)),
        ("self_similar", dict(t0=-100.0)),
        ("conjugated_self_similar", dict(t0=-1.0)),
        ("gaussian", dict(r0=5.0)),
        ("gaussian", dict(r0=50.0, width=1.0)),
        ("gaussian", dict(r0=5.0, width=1.0, core="matched")),
    ])
    def test_preconditions(self, unit_params, kind, kwargs):
        with pytest.raises(DomainError):
            tdse.init_state(tdse.make_grid(40.0, 1024), unit_params, kind, **kwargs)


class TestCrankNicolson:
    def test_step_advances_time(self, unit_params):
        state = gaussian_state(unit_params)
        tdse.step_crank_nicolson(state, 1e-3)
        assert state.t == pytest.approx(1e-3)
        assert state.u[-1] == 0

    def test_reversible(self, unit_params):
        state = gaussian_state(unit_params)
        start = state.u.copy()
        tdse.step_crank_nicolson(state, 5e-3)
        tdse.step_crank_nicolson(state, -5e-3)
        assert np.linalg.norm(state.u - start) <= 1e-10 * np.linalg.norm(start)

    def test_norm_conserved_over_many_steps(self, unit_params):
        state = gaussian_state(unit_params)
        for _ in range(10_000):
            tdse.step_crank_nicolson(state, 1e-3)
        assert abs(state.norm - 1.0) <= 1e-9

    def test_zero_step_rejected(self, unit_params):
        with pytest.raises(DomainError):
            tdse.step_crank_nicolson(gaussian_state(unit_params), 0.0)

    def test_free_packet_spreading(self, unit_params):
        width = 0.5
        grid = tdse.make_grid(80.0, 4096)
        state = tdse.init_state(grid, unit_params, "gaussian", r0=30.0, width=width, potential=np.zeros(grid.n_points))
        record = tdse.evolve_and_record(state, 0.5, 1e-3, record_every=50)
        t = np.asarray(record.times)
        expected = width ** 2 / 2 * (1 + (t / width ** 2) ** 2)
        np.testing.assert_allclose(np.asarray(record.r_spreads) ** 2, expected, rtol=1e-2)
        assert np.isnan(record.overlaps).all()

    def test_observed_order(self, unit_params):
        finals = []
        for n_points, dt in ((512, 4e-3), (1024, 2e-3), (2048, 1e-3)):
            state = gaussian_state(unit_params, n_points=n_points)
            record = tdse.evolve_and_record(state, 0.4, dt, record_every=1000)
            finals.append(record.r_means[-1])
        assert tdse.richardson_order(*finals) >= 1.8


class TestEvolution:
    def test_record_shape(self, unit_params):
        state = gaussian_state(unit_params)
        record = tdse.evolve_and_record(state, 0.1, 1e-3, record_every=10)
        assert len(record.times) == 11
        assert record.times[0] == 0.0 and record.times[-1] == pytest.approx(0.1)

    def test_direction_follows_end_time(self, unit_params):
        state = gaussian_state(unit_params)
        record = tdse.evolve_and_record(state, -0.05, 1e-3, record_every=10)
        assert record.times[-1] == pytest.approx(-0.05)
        assert np.all(np.diff(record.times) < 0)

    def test_ends_exactly_between_steps(self, unit_params):
        state = gaussian_state(unit_params)
        record = tdse.evolve_and_record(state, 0.0104, 1e-3, record_every=5)
        assert record.times[-1] == 0.0104
        assert state.t == 0.0104
        assert record.times[-2] == pytest.approx(0.010)

    def test_end_shorter_than_one_step(self, unit_params):
        state = gaussian_state(unit_params)
        record = tdse.evolve_and_record(state, 0.0004, 1e-3)
        assert record.times == [0.0, 0.0004]
        assert record.norms[-1] == pytest.approx(1.0, rel=1e-10)

    @pytest.mark.parametrize("t_end,record_every", [(0.0, 1), (0.1, 0)])
    def test_invalid_requests(self, unit_params, t_end, record_every):
        with pytest.raises(DomainError):
            tdse.evolve_and_record(gaussian_state(unit_params), t_end, 1e-3, record_every)

    def test_halts_at_core(self, unit_params):
        grid = tdse.make_grid(40.0, 1024, r_core=0.2)
        state = tdse.init_state(grid, unit_params, "self_similar", t0=-1.0)
        with pytest.raises(HaltedAtCore) as info:
            tdse.evolve_and_record(state, -1e-3, 1e-3, record_every=10)
        record = info.value.record
        assert record is not None and len(record.times) >= 1
        assert record.r_means[-1] < tdse.HALT_CORE_MULTIPLE * grid.r_core


class TestPowerLawFit:
    def test_exact_square_root(self):
        t = np.linspace(-1.0, -0.1, 10)
        exponent, prefactor, r_squared = tdse.fit_power_law(t, 2.0 * np.sqrt(-t))
        assert exponent == pytest.approx(0.5, abs=1e-12)
        assert prefactor == pytest.approx(2.0, abs=1e-12)
        assert r_squared == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("times,values", [
        (np.linspace(1, 2, 5), np.linspace(1, 2, 5)),
        (np.linspace(1, 2, 10), np.full(10, 3.0)),
        (np.linspace(1, 2, 10), np.linspace(-1, 1, 10)),
        (np.linspace(0, 2, 10), np.linspace(1, 2, 10)),
    ])
    def test_degenerate_inputs(self, times, values):
        with pytest.raises(FitError):
            tdse.fit_power_law(times, values)

    def test_richardson_order_of_exact_sequence(self):
        assert tdse.richardson_order(1.0 + 0.16, 1.0 + 0.04, 1.0 + 0.01) == pytest.approx(2.0)


@pytest.fixture(scope="module")
def collapse_run():
    p = params_for_gamma(1.0)
    state = tdse.init_state(tdse.make_grid(), p, "self_similar", t0=-1.0)
    return tdse.evolve_and_record(state, -0.1)


@pytest.mark.slow
class TestSelfSimilarRuns:
    def test_fidelity(self, collapse_run):
        assert min(collapse_run.overlaps) >= 0.99

    def test_square_root_law(self, collapse_run):
        t = np.asarray(collapse_run.times)
        ratio = np.asarray(collapse_run.r_means) / np.sqrt(-t)
        assert np.ptp(ratio) / ratio.mean() <= 2e-2
        exponent, _, _ = tdse.fit_power_law(t, collapse_run.r_means)
        assert exponent == pytest.approx(0.5, abs=0.02)

    def test_probability_flows_into_origin(self, collapse_run):
        norms = np.asarray(collapse_run.norms)
        assert np.all(np.diff(norms) < 0)
        assert norms[-1] == pytest.approx(0.1 ** 1.5, rel=0.1)

    def test_escape_mirrors_collapse(self, collapse_run):
        p = params_for_gamma(1.0)
        state = tdse.init_state(tdse.make_grid(), p, "conjugated_self_similar", t0=0.1)
        escape = tdse.evolve_and_record(state, 1.0)
        t = np.asarray(escape.times)
        exponent, _, _ = tdse.fit_power_law(t, escape.r_means)
        assert exponent == pytest.approx(0.5, abs=0.02)
        ratio = np.asarray(escape.r_means) / np.sqrt(t)
        assert np.ptp(ratio) / ratio.mean() <= 2e-2
        collapse_t = -np.asarray(collapse_run.times)[::-1]
        mirrored = np.interp(t, collapse_t, np.asarray(collapse_run.r_means)[::-1])
        np.testing.assert_allclose(escape.r_means, mirrored, rtol=1e-2)
