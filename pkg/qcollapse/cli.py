import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np
from pydantic import ValidationError as PydanticValidationError

from qcollapse import csv_io, observables, plotting, profile, settings, tdse
from qcollapse.errors import HaltedAtCore, InvalidInput, NumericalError, QCollapseError, ValidationError
from qcollapse.graph_factory import run_checks
from qcollapse.models import RunConfig
from qcollapse.nodes.router import SUITES
from qcollapse.params import DEFAULT_HBAR, DEFAULT_MASS, derive_params

logger = logging.getLogger(__name__)

DEFAULT_PROFILE_XI_MIN = 0.05
DEFAULT_PROFILE_XI_MAX = 30.0
DEFAULT_PROFILE_POINTS = 400
DEFAULT_CHECK_GAMMAS = "0.3,0.5,1,2,5,10"
DEFAULT_T0 = -1.0
DEFAULT_T_END = -0.1


def _resolve_params(command, gamma, beta_tilde, ell, hbar, mass):
    try:
        config = RunConfig(command=command, gamma=gamma, beta_tilde=beta_tilde, ell=ell, hbar=hbar, mass=mass)
        strength, ell = config.strength()
    except (PydanticValidationError, ValueError) as e:
        raise InvalidInput(str(e)) from e
    logger.debug(f"{config.command}: strength={strength:g}, ell={ell}, hbar={config.hbar:g}, mass={config.mass:g}")
    return derive_params(strength, ell, hbar, mass)


def parse_sweep(text: str | None) -> list[float] | None:
    """'gamma=0.5,1,2' -> [0.5, 1.0, 2.0]."""
    if text is None:
        return None
    key, _, values = text.partition("=")
    if key.strip() != "gamma" or not values:
        raise InvalidInput(f"--sweep expects gamma=v1,v2,..., got {text!r}")
    try:
        return [float(v) for v in values.split(",")]
    except ValueError as e:
        raise InvalidInput(f"--sweep values must be numbers: {values!r}") from e


def _sweep_path(out: Path, gamma: float) -> Path:
    return out.with_name(f"{out.stem}_gamma{gamma:g}{out.suffix}")


def _run_sweep(task, gammas: list[float]):
    workers = min(settings.sweep_threads(), len(gammas))
    logger.info(f"Sweeping {len(gammas)} values of gamma on {workers} thread(s)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, gammas))


def strength_options(f):
    options = [
        click.option("--gamma", type=float, default=None, help="gamma = beta_tilde - ell(ell+1) (s-wave shortcut)."),
        click.option("--beta-tilde", type=float, default=None, help="Dimensionless strength 2 m beta / hbar^2."),
        click.option("--ell", type=int, default=None, help="Orbital quantum number (with --beta-tilde)."),
        click.option("--hbar", type=float, default=DEFAULT_HBAR, show_default=True),
        click.option("--mass", type=float, default=DEFAULT_MASS, show_default=True),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _apply_config(ctx, param, value):
    if value is None:
        return value
    values = settings.load_config_file(value)
    ctx.default_map = {name: dict(values) for name in ctx.command.commands}
    return value


@click.group()
@click.option("--config", type=click.Path(dir_okay=False), callback=_apply_config, is_eager=True,
              expose_value=False, help="key=value file supplying option defaults.")
@click.option("--quiet", is_flag=True, help="Only warnings and errors on the console.")
def cli(quiet):
    """Self-similar quantum collapse in an inverse-square potential."""
    settings.setup_logging(quiet=quiet)


@cli.command("params")
@strength_options
def params_command(gamma, beta_tilde, ell, hbar, mass):
    """Derive gamma, alpha and chi and report the asymptotic constants."""
    params = _resolve_params("params", gamma, beta_tilde, ell, hbar, mass)
    c_inf = profile.tail_constant(params)
    click.echo(f"gamma        {params.gamma:.17g}")
    click.echo(f"alpha        {params.alpha:.17g}")
    click.echo(f"chi          {params.chi:.17g}")
    click.echo(f"nu           {params.nu:.17g}")
    click.echo(f"C_inf        {c_inf.real:.17g} {c_inf.imag:+.17g}j")
    click.echo(f"C_0          {profile.majorant_constant(params):.17g}")
    click.echo(f"I0 (exact)   {observables.analytic_norm(params):.17g}")
    click.echo(f"monotone     {profile.small_xi_monotone(params)}")


@cli.command("profile")
@strength_options
@click.option("--xi-min", type=float, default=DEFAULT_PROFILE_XI_MIN, show_default=True)
@click.option("--xi-max", type=float, default=DEFAULT_PROFILE_XI_MAX, show_default=True)
@click.option("--n-points", type=int, default=DEFAULT_PROFILE_POINTS, show_default=True)
@click.option("--spacing", type=click.Choice(["log", "linear"]), default="log", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="profile.csv", show_default=True)
@click.option("--sweep", default=None, help="gamma=v1,v2,... writes one table per value.")
def profile_command(gamma, beta_tilde, ell, hbar, mass, xi_min, xi_max, n_points, spacing, out, sweep):
    """Tabulate R, |R|^2 and R' on a xi grid."""
    if not 0 < xi_min < xi_max or n_points < 2:
        raise InvalidInput("need 0 < xi-min < xi-max and n-points >= 2")
    xi = np.geomspace(xi_min, xi_max, n_points) if spacing == "log" else np.linspace(xi_min, xi_max, n_points)
    out = Path(out)

    def tabulate(params, path):
        return csv_io.write_profile_csv(profile.build_profile_table(params, xi), path)

    gammas = parse_sweep(sweep)
    if gammas is None:
        path = tabulate(_resolve_params("profile", gamma, beta_tilde, ell, hbar, mass), out)
        click.echo(str(path))
        return
    paths = _run_sweep(lambda g: tabulate(derive_params(g, 0, hbar, mass), _sweep_path(out, g)), gammas)
    for path in paths:
        click.echo(str(path))


@cli.command("check")
@click.option("--gammas", default=DEFAULT_CHECK_GAMMAS, show_default=True, help="Comma-separated gamma values.")
@click.option("--suite", "suites", multiple=True, type=click.Choice(SUITES), help="Suites to run (default: all).")
@click.pass_context
def check_command(ctx, gammas, suites):
    """Run the verification suites and print a pass/fail table."""
    try:
        values = [float(g) for g in gammas.split(",")]
    except ValueError as e:
        raise InvalidInput(f"--gammas must be comma-separated numbers: {gammas!r}") from e
    for g in values:
        derive_params(g)
    results = run_checks(values, suites or SUITES)

    click.echo(f"{'suite':<12} {'gamma':>6}  {'check':<40} {'value':>11} {'limit':>9}  verdict")
    for row in results:
        gamma = "-" if row["gamma"] is None else f"{row['gamma']:g}"
        verdict = "PASS" if row["passed"] else "FAIL"
        click.echo(f"{row['suite']:<12} {gamma:>6}  {row['check']:<40} {row['value']:>11.3e} "
                   f"{row['limit']:>9.1e}  {verdict}")
    failed = sum(not row["passed"] for row in results)
    logger.info(f"Checks finished: {len(results) - failed} passed, {failed} failed")
    if failed:
        ctx.exit(2)


@cli.command("observables")
@strength_options
@click.option("--xi-max", type=float, default=observables.DEFAULT_XI_MAX, show_default=True)
@click.option("--xi-min", type=float, default=observables.DEFAULT_XI_MIN, show_default=True)
@click.option("--tol", type=float, default=observables.DEFAULT_TOL, show_default=True)
@click.option("--t", "t", type=float, default=DEFAULT_T0, show_default=True, help="Time for <r>, <p> and E.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the CSV row(s) here.")
@click.option("--sweep", default=None, help="gamma=v1,v2,... computes one report per value.")
def observables_command(gamma, beta_tilde, ell, hbar, mass, xi_max, xi_min, tol, t, out, sweep):
    """Norm, moments, scaling constants and mean energy of the profile."""
    def compute(params):
        return observables.radial_moment_integrals(params, xi_max, tol, xi_min)

    gammas = parse_sweep(sweep)
    if gammas is None:
        reports = [compute(_resolve_params("observables", gamma, beta_tilde, ell, hbar, mass))]
    else:
        reports = _run_sweep(lambda g: compute(derive_params(g, 0, hbar, mass)), gammas)

    for report in reports:
        click.echo(csv_io.format_report(report))
        energy, _ = observables.mean_energy(report.params, t, report=report)
        r_mean, p_mean, product = observables.expectations_at_time(report, t)
        click.echo(f"E(t={t:g})        {energy.real:.17g} {energy.imag:+.17g}j")
        click.echo(f"<r>, <p>, <r><p>  {r_mean:.17g} {p_mean:.17g} {product:.17g}")
        click.echo("")
    if out:
        click.echo(str(csv_io.write_observables_csv(reports, out)))


@cli.command("evolve")
@strength_options
@click.option("--init", "kind", type=click.Choice(["self_similar", "gaussian", "conjugated_self_similar"]),
              default="self_similar", show_default=True)
@click.option("--t0", type=float, default=DEFAULT_T0, show_default=True)
@click.option("--t-end", type=float, default=DEFAULT_T_END, show_default=True)
@click.option("--dt", type=float, default=tdse.DEFAULT_DT, show_default=True, help="Step size; sign follows t-end.")
@click.option("--r-max", type=float, default=tdse.DEFAULT_R_MAX, show_default=True)
@click.option("--n-points", type=int, default=tdse.DEFAULT_N_POINTS, show_default=True)
@click.option("--r-core", type=float, default=None, help="Core radius [default: r-max/2048].")
@click.option("--core", type=click.Choice(["capped", "matched"]), default=None,
              help="Core model [default: matched for analytic states, capped for gaussian].")
@click.option("--r0", type=float, default=None, help="Gaussian centre.")
@click.option("--width", type=float, default=None, help="Gaussian width.")
@click.option("--record-every", type=int, default=tdse.DEFAULT_RECORD_EVERY, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="record.csv", show_default=True)
@click.option("--snapshot", type=click.Path(dir_okay=False), default=None, help="Final state CSV.")
@click.option("--fit", "do_fit", is_flag=True, help="Fit <r> to a power law of |t|.")
def evolve_command(gamma, beta_tilde, ell, hbar, mass, kind, t0, t_end, dt, r_max, n_points, r_core, core,
                   r0, width, record_every, out, snapshot, do_fit):
    """Propagate a radial wave packet with Crank-Nicolson."""
    params = _resolve_params("evolve", gamma, beta_tilde, ell, hbar, mass)
    grid = tdse.make_grid(r_max, n_points, r_core)
    state = tdse.init_state(grid, params, kind, t0=t0, r0=r0, width=width, core=core)
    try:
        record = tdse.evolve_and_record(state, t_end, dt, record_every)
    except HaltedAtCore as e:
        logger.warning(str(e))
        record = e.record
    click.echo(str(csv_io.write_record_csv(record, out)))
    if snapshot:
        click.echo(str(csv_io.write_snapshot_csv(state, snapshot)))
    if do_fit:
        exponent, prefactor, r_squared = tdse.fit_power_law(record.times, record.r_means)
        click.echo(f"nu = {exponent:.6f}  prefactor = {prefactor:.6g}  r^2 = {r_squared:.8f}")


@cli.command("fit")
@click.option("--in", "source", type=click.Path(dir_okay=False), required=True, help="Record CSV.")
@click.option("--column", type=click.Choice(["r_mean", "norm"]), default="r_mean", show_default=True)
def fit_command(source, column):
    """Power-law fit of a recorded series against |t|."""
    name, data = csv_io.read_table(source)
    if name != "record":
        raise InvalidInput(f"{source} is a {name} table, not an evolution record")
    exponent, prefactor, r_squared = tdse.fit_power_law(data["t"], data[column])
    click.echo(f"nu = {exponent:.6f}  prefactor = {prefactor:.6g}  r^2 = {r_squared:.8f}")


@cli.command("plot")
@click.option("--style", type=click.Choice(["profile", "fig1", "record"]), default="profile", show_default=True)
@click.option("--in", "source", type=click.Path(dir_okay=False), default=None, help="Profile or record CSV.")
@click.option("--out", type=click.Path(dir_okay=False), default="plot.svg", show_default=True)
def plot_command(style, source, out):
    """Standalone SVG figure from a CSV table."""
    data = None
    if source is not None:
        name, data = csv_io.read_table(source)
        if style != "fig1" and name != style:
            raise InvalidInput(f"style {style!r} needs a {style} table, got {name}")
    click.echo(str(plotting.render(style, out, data)))


def parse_and_dispatch(argv=None) -> int:
    """Run one command; 0 on success, 1 on invalid input, 2 on numerical failure."""
    try:
        rv = cli.main(args=argv, prog_name="qcollapse", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        click.echo(f"error: {e}", err=True)
        return e.exit_code
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        click.echo(f"numerical error: {e}", err=True)
        return e.exit_code
    except QCollapseError as e:
        click.echo(f"error: {e}", err=True)
        return 2
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        click.echo(f"unexpected error: {e}", err=True)
        return 2
    # non-standalone click returns the exit code of ctx.exit() instead of raising
    return rv if isinstance(rv, int) else 0


def main() -> None:
    sys.exit(parse_and_dispatch())
