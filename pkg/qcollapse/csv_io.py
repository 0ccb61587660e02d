"""CSV formats written and read by the command-line tool.

Every float is written with 17 significant digits so values round-trip exactly.
"""
import logging
from pathlib import Path
from typing import Iterable

import numpy as np

from qcollapse.errors import InvalidInput
from qcollapse.models import EvolutionRecord, ObservableReport, ProfileTable, WavePacketState

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

PROFILE_COLUMNS = ("xi", "re_R", "im_R", "abs2_R", "re_dR", "im_dR")
OBSERVABLE_COLUMNS = ("gamma", "I0", "I1", "I2", "C_r", "C_p", "E_dimless", "quad_error")
SNAPSHOT_COLUMNS = ("t", "r", "re_u", "im_u", "abs2_u")
RECORD_COLUMNS = ("t", "norm", "r_mean", "fidelity")

FORMATS = {
    "profile": PROFILE_COLUMNS,
    "observables": OBSERVABLE_COLUMNS,
    "snapshot": SNAPSHOT_COLUMNS,
    "record": RECORD_COLUMNS,
}


def _write(path, columns: tuple[str, ...], rows: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(rows), fmt=FLOAT_FORMAT, delimiter=",", header=",".join(columns), comments="")
    logger.debug(f"Wrote {len(np.atleast_2d(rows))} rows to {path}")
    return path


def write_profile_csv(table: ProfileTable, path) -> Path:
    rows = np.column_stack([table.xi, table.R.real, table.R.imag, table.abs2, table.dR.real, table.dR.imag])
    return _write(path, PROFILE_COLUMNS, rows)


def _max_relative_error(report: ObservableReport) -> float:
    values = {"I0": report.norm_I0, "I1": report.moment_I1, "I2": report.kinetic_I2,
              "J": report.energy_J, "P": report.radial_P}
    return max((err / abs(values[name]) for name, err in report.quad_error.items() if values.get(name)),
               default=0.0)


def write_observables_csv(reports: Iterable[ObservableReport], path) -> Path:
    rows = [[r.gamma, r.norm_I0, r.moment_I1, r.kinetic_I2, r.C_r, r.C_p, r.energy_dimless,
             _max_relative_error(r)] for r in reports]
    if not rows:
        raise InvalidInput("no observable reports to write")
    return _write(path, OBSERVABLE_COLUMNS, np.array(rows, dtype=float))


def write_snapshot_csv(state: WavePacketState, path) -> Path:
    r = state.grid.r
    rows = np.column_stack([np.full(r.size, state.t), r, state.u.real, state.u.imag, np.abs(state.u) ** 2])
    return _write(path, SNAPSHOT_COLUMNS, rows)


def write_record_csv(record: EvolutionRecord, path) -> Path:
    rows = np.column_stack([record.times, record.norms, record.r_means, record.overlaps])
    return _write(path, RECORD_COLUMNS, rows)


def read_table(path) -> tuple[str, np.ndarray]:
    """Load one of this tool's CSV files; returns (format name, structured array)."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInput(f"no such file: {path}")
    with path.open() as fh:
        header = tuple(fh.readline().strip().split(","))
    for name, columns in FORMATS.items():
        if header == columns:
            data = np.atleast_1d(np.genfromtxt(path, delimiter=",", names=True))
            return name, data
    raise InvalidInput(f"{path} is not a recognised qcollapse CSV (header {','.join(header)})")


def format_report(report: ObservableReport) -> str:
    lines = [f"gamma            {report.gamma:.17g}",
             f"alpha            {report.params.alpha:.17g}",
             f"xi range         [{report.xi_min:g}, {report.xi_max:g}]",
             f"I0               {report.norm_I0:.17g}",
             f"I1               {report.moment_I1:.17g}",
             f"I2 (cut off)     {report.kinetic_I2:.17g}",
             f"I2 log slope     {report.kinetic_log_slope:.17g}",
             f"J                {report.energy_J.real:.17g} {report.energy_J.imag:+.17g}j",
             f"C_r              {report.C_r:.17g}",
             f"C_p              {report.C_p:.17g}",
             f"E_dimless        {report.energy_dimless:.17g}",
             f"Re E * |t|/hbar  {report.energy_real_coeff:.17g}",
             f"-Im E * |t|/hbar {report.decay_coeff:.17g}"]
    return "\n".join(lines)
