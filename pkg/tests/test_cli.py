import numpy as np
import pytest

from qcollapse import csv_io
from qcollapse.cli import parse_and_dispatch, parse_sweep
from qcollapse.errors import InvalidInput
from qcollapse.models import EvolutionRecord


def header(path):
    return path.read_text().splitlines()[0]


@pytest.fixture
def record_csv(tmp_path):
    t = np.linspace(-1.0, -0.1, 10)
    record = EvolutionRecord(times=list(t), norms=list(np.ones(10)), r_means=list(2.0 * np.sqrt(-t)),
                             r_spreads=list(np.ones(10)), overlaps=list(np.ones(10)))
    return csv_io.write_record_csv(record, tmp_path / "record.csv")


def test_params_reports_derived_values(capsys):
    assert parse_and_dispatch(["params", "--gamma", "1"]) == 0
    out = capsys.readouterr().out
    assert "alpha        1.7320508075688772" in out
    assert "monotone" in out


def test_resolved_parameters_are_logged_per_command(caplog):
    with caplog.at_level("DEBUG", logger="qcollapse.cli"):
        assert parse_and_dispatch(["params", "--gamma", "2"]) == 0
    assert any(r.getMessage().startswith("params: strength=2") for r in caplog.records)


def test_fall_condition_exit_code(capsys):
    assert parse_and_dispatch(["params", "--beta-tilde", "0.25"]) == 1
    assert "gamma > 1/4" in capsys.readouterr().err


def test_conflicting_strength_options():
    assert parse_and_dispatch(["params", "--gamma", "1", "--beta-tilde", "2"]) == 1


def test_unknown_option_is_usage_error():
    assert parse_and_dispatch(["profile", "--no-such-option"]) == 1


def test_profile_csv(tmp_path):
    out = tmp_path / "profile.csv"
    assert parse_and_dispatch(["profile", "--gamma", "1", "--n-points", "20", "--out", str(out)]) == 0
    assert header(out) == ",".join(csv_io.PROFILE_COLUMNS)
    name, data = csv_io.read_table(out)
    assert name == "profile" and data.size == 20
    np.testing.assert_allclose(data["abs2_R"], data["re_R"] ** 2 + data["im_R"] ** 2, rtol=1e-14)


def test_profile_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        assert parse_and_dispatch(["profile", "--gamma", "2", "--n-points", "50", "--out", str(out)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_profile_sweep(tmp_path):
    out = tmp_path / "profile.csv"
    assert parse_and_dispatch(["profile", "--sweep", "gamma=0.5,1", "--n-points", "10", "--out", str(out)]) == 0
    for gamma in ("0.5", "1"):
        assert header(tmp_path / f"profile_gamma{gamma}.csv") == ",".join(csv_io.PROFILE_COLUMNS)


def test_config_file_supplies_defaults(tmp_path):
    config = tmp_path / "run.env"
    config.write_text("GAMMA=2\nN_POINTS=5\n")
    from_config, explicit = tmp_path / "config.csv", tmp_path / "explicit.csv"
    assert parse_and_dispatch(["--config", str(config), "profile", "--n-points", "7", "--out", str(from_config)]) == 0
    assert parse_and_dispatch(["profile", "--gamma", "2", "--n-points", "7", "--out", str(explicit)]) == 0
    assert from_config.read_bytes() == explicit.read_bytes()
    assert len(from_config.read_text().splitlines()) == 8


def test_missing_config_file(tmp_path):
    assert parse_and_dispatch(["--config", str(tmp_path / "absent.env"), "params", "--gamma", "1"]) == 1


def test_observables_csv(tmp_path, capsys):
    out = tmp_path / "obs.csv"
    assert parse_and_dispatch(["observables", "--gamma", "1", "--out", str(out)]) == 0
    assert header(out) == ",".join(csv_io.OBSERVABLE_COLUMNS)
    line = next(row for row in capsys.readouterr().out.splitlines() if row.startswith("-Im E"))
    assert float(line.split()[-1]) == pytest.approx(0.75, abs=1e-8)


def test_check_suite_passes(capsys):
    assert parse_and_dispatch(["check", "--gammas", "1", "--suite", "identities"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_check_rejects_gamma_below_threshold():
    assert parse_and_dispatch(["check", "--gammas", "0.2"]) == 1


def test_evolve_gaussian(tmp_path):
    out, snapshot = tmp_path / "rec.csv", tmp_path / "snap.csv"
    argv = ["evolve", "--gamma", "1", "--init", "gaussian", "--r0", "5", "--width", "1", "--t0", "0",
            "--t-end", "0.05", "--dt", "1e-3", "--r-max", "20", "--n-points", "512", "--record-every", "5",
            "--out", str(out), "--snapshot", str(snapshot)]
    assert parse_and_dispatch(argv) == 0
    name, data = csv_io.read_table(out)
    assert name == "record" and data.size == 11
    assert header(snapshot) == ",".join(csv_io.SNAPSHOT_COLUMNS)


def test_evolve_gaussian_without_width(tmp_path):
    argv = ["evolve", "--gamma", "1", "--init", "gaussian", "--r0", "5", "--t0", "0", "--t-end", "0.01",
            "--n-points", "512", "--out", str(tmp_path / "rec.csv")]
    assert parse_and_dispatch(argv) == 1


def test_fit_record(record_csv, capsys):
    assert parse_and_dispatch(["fit", "--in", str(record_csv)]) == 0
    assert "nu = 0.500000" in capsys.readouterr().out


def test_fit_rejects_profile_table(tmp_path):
    out = tmp_path / "profile.csv"
    parse_and_dispatch(["profile", "--gamma", "1", "--n-points", "10", "--out", str(out)])
    assert parse_and_dispatch(["fit", "--in", str(out)]) == 1


def test_fit_missing_file(tmp_path):
    assert parse_and_dispatch(["fit", "--in", str(tmp_path / "absent.csv")]) == 1


def test_plot_record_svg(record_csv, tmp_path):
    first, second = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (first, second):
        assert parse_and_dispatch(["plot", "--style", "record", "--in", str(record_csv), "--out", str(out)]) == 0
    assert "<svg" in first.read_text()
    assert first.read_bytes() == second.read_bytes()


def test_plot_style_must_match_table(record_csv, tmp_path):
    argv = ["plot", "--style", "profile", "--in", str(record_csv), "--out", str(tmp_path / "x.svg")]
    assert parse_and_dispatch(argv) == 1


def test_plot_fig1(tmp_path):
    out = tmp_path / "fig1.svg"
    assert parse_and_dispatch(["plot", "--style", "fig1", "--out", str(out)]) == 0
    assert "<svg" in out.read_text()


class TestParseSweep:
    def test_values(self):
        assert parse_sweep("gamma=0.5,1,2") == [0.5, 1.0, 2.0]

    def test_none(self):
        assert parse_sweep(None) is None

    @pytest.mark.parametrize("text", ["beta=1,2", "gamma=", "gamma=a,b"])
    def test_malformed(self, text):
        with pytest.raises(InvalidInput):
            parse_sweep(text)
