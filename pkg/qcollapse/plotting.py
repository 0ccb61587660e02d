"""Static SVG figures from the tool's CSV files."""
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from qcollapse.errors import InvalidInput  # noqa: E402
from qcollapse.params import params_for_gamma  # noqa: E402
from qcollapse.profile import evaluate_R  # noqa: E402
from qcollapse.tdse import fit_power_law  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "qcollapse"
plt.rcParams["svg.fonttype"] = "none"

FIG1_GAMMAS = (0.5, 1.0, 2.0)
FIG1_WINDOWS = ((0.05, 1.0), (1.0, 5.0), (5.0, 30.0))


def _save(fig, out) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Wrote {out}")
    return out


def plot_profile(data: np.ndarray, out) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(data["xi"], data["abs2_R"], lw=1.5)
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$|R(\xi)|^2$")
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, out)


def plot_record(data: np.ndarray, out) -> Path:
    t = np.abs(data["t"])
    r_mean = data["r_mean"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(t, r_mean, "o", ms=3, label=r"$\langle r \rangle$")
    if t.size >= 8:
        exponent, prefactor, _ = fit_power_law(t, r_mean)
        grid = np.geomspace(t.min(), t.max(), 100)
        ax.loglog(grid, prefactor * grid ** exponent, "-", label=rf"fit: $\nu = {exponent:.3f}$")
    ax.set_xlabel(r"$|t|$")
    ax.set_ylabel(r"$\langle r \rangle$")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, out)


def plot_fig1(out, n_points: int = 400) -> Path:
    """|R|**2 for three values of gamma over three xi windows."""
    fig, axes = plt.subplots(1, len(FIG1_WINDOWS), figsize=(12, 4))
    for ax, (lo, hi) in zip(axes, FIG1_WINDOWS):
        xi = np.linspace(lo, hi, n_points)
        for gamma in FIG1_GAMMAS:
            R = np.asarray(evaluate_R(params_for_gamma(gamma), xi))
            ax.plot(xi, np.abs(R) ** 2, label=rf"$\gamma = {gamma:g}$")
        ax.set_xlabel(r"$\xi$")
        ax.set_yscale("log")
        ax.grid(True, alpha=0.3)
    axes[0].set_ylabel(r"$|R(\xi)|^2$")
    axes[0].legend()
    return _save(fig, out)


PLOT_STYLES = {
    "profile": plot_profile,
    "record": plot_record,
}


def render(style: str, out, data: np.ndarray | None = None) -> Path:
    if style == "fig1":
        return plot_fig1(out)
    if style not in PLOT_STYLES:
        raise InvalidInput(f"unknown plot style {style!r}")
    if data is None:
        raise InvalidInput(f"plot style {style!r} needs an input CSV")
    return PLOT_STYLES[style](data, out)
