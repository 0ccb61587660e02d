import numpy as np
import pytest

from qcollapse import csv_io, tdse
from qcollapse.errors import InvalidInput
from qcollapse.models import EvolutionRecord
from qcollapse.observables import radial_moment_integrals
from qcollapse.params import params_for_gamma
from qcollapse.profile import build_profile_table


def test_profile_values_survive_text_format(tmp_path, unit_params):
    table = build_profile_table(unit_params, np.geomspace(0.05, 30.0, 25))
    name, data = csv_io.read_table(csv_io.write_profile_csv(table, tmp_path / "p.csv"))
    assert name == "profile"
    assert np.array_equal(data["xi"], table.xi)
    assert np.array_equal(data["re_R"] + 1j * data["im_R"], table.R)


def test_record_table(tmp_path):
    record = EvolutionRecord(times=[-1.0, -0.5], norms=[1.0, 0.4], r_means=[2.0, 1.4],
                             r_spreads=[0.5, 0.3], overlaps=[1.0, 0.999])
    path = csv_io.write_record_csv(record, tmp_path / "nested" / "r.csv")
    assert path.read_text().splitlines()[0] == "t,norm,r_mean,fidelity"
    name, data = csv_io.read_table(path)
    assert name == "record"
    assert list(data["r_mean"]) == [2.0, 1.4]


def test_snapshot_table(tmp_path, unit_params):
    state = tdse.init_state(tdse.make_grid(20.0, 256), unit_params, "gaussian", r0=5.0, width=1.0)
    name, data = csv_io.read_table(csv_io.write_snapshot_csv(state, tmp_path / "s.csv"))
    assert name == "snapshot" and data.size == 256
    assert np.all(data["t"] == 0.0)


def test_observables_rows(tmp_path):
    reports = [radial_moment_integrals(params_for_gamma(g)) for g in (1.0, 2.0)]
    name, data = csv_io.read_table(csv_io.write_observables_csv(reports, tmp_path / "o.csv"))
    assert name == "observables"
    assert list(data["gamma"]) == [1.0, 2.0]
    assert np.all(data["quad_error"] <= 1e-10)


def test_no_reports(tmp_path):
    with pytest.raises(InvalidInput):
        csv_io.write_observables_csv([], tmp_path / "o.csv")


def test_unrecognised_header(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInput, match="not a recognised"):
        csv_io.read_table(path)


def test_format_report_lists_constants():
    text = csv_io.format_report(radial_moment_integrals(params_for_gamma(1.0)))
    for label in ("I0", "C_r", "C_p", "E_dimless", "I2 log slope"):
        assert label in text
