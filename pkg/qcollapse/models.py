from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

CoreModel = Literal["capped", "matched"]
InitKind = Literal["self_similar", "gaussian", "conjugated_self_similar"]


class CollapseParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    beta_tilde: float
    ell: int = Field(ge=0)
    hbar: float = Field(gt=0)
    mass: float = Field(gt=0)
    chi: float = Field(gt=0)
    gamma: float = Field(gt=0.25)
    alpha: float = Field(gt=0)
    nu: float = 0.5

    @property
    def centrifugal(self) -> float:
        return float(self.ell * (self.ell + 1))


class EvalAccuracy(BaseModel):
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-13, gt=0)
    max_terms: int = Field(default=10000, ge=1)
    asymptotic_threshold: float = Field(default=40.0, gt=0)
    series_threshold: float = Field(default=6.0, gt=0)

    @model_validator(mode="after")
    def _thresholds_ordered(self):
        if self.series_threshold > self.asymptotic_threshold:
            raise ValueError("series_threshold must not exceed asymptotic_threshold")
        return self


class ProfileTable(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: CollapseParams
    xi: np.ndarray
    R: np.ndarray
    dR: np.ndarray
    d2R: np.ndarray
    abs2: np.ndarray
    C_normalization: float = 1.0
    C_infinity: complex
    C_zero: float

    @field_validator("xi")
    @classmethod
    def _xi_ascending(cls, xi: np.ndarray) -> np.ndarray:
        if xi.ndim != 1 or xi.size == 0:
            raise ValueError("xi must be a non-empty 1-D grid")
        if np.any(xi <= 0) or np.any(np.diff(xi) <= 0):
            raise ValueError("xi must be strictly increasing and positive")
        return xi


class ObservableReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    params: CollapseParams
    xi_min: float
    xi_max: float
    norm_I0: Optional[float] = None
    moment_I1: Optional[float] = None
    kinetic_I2: Optional[float] = None
    kinetic_log_slope: Optional[float] = None
    energy_J: Optional[complex] = None
    radial_P: Optional[complex] = None
    C_r: Optional[float] = None
    C_p: Optional[float] = None
    energy_dimless: Optional[float] = None
    energy_real_coeff: Optional[float] = None
    decay_coeff: Optional[float] = None
    quad_error: dict[str, float] = Field(default_factory=dict)

    @property
    def gamma(self) -> float:
        return self.params.gamma


class RadialGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    r_max: float = Field(gt=0)
    n_points: int = Field(ge=256)
    r_core: float = Field(gt=0)

    @model_validator(mode="after")
    def _core_inside(self):
        if not self.r_core < self.r_max / 100:
            raise ValueError("r_core must be below r_max/100")
        return self

    @property
    def dr(self) -> float:
        return self.r_max / self.n_points

    @property
    def r(self) -> np.ndarray:
        return self.dr * np.arange(1, self.n_points + 1)


class WavePacketState(BaseModel):
    """Mutable radial state; one evolution owns it at a time."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: RadialGrid
    u: np.ndarray
    t: float
    params: CollapseParams
    potential: np.ndarray
    core: CoreModel = "capped"
    kind: InitKind = "gaussian"
    # scale between u and r*R(xi) for the analytic kinds
    amplitude: complex = 1.0

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.u) ** 2) * self.grid.dr)


class EvolutionRecord(BaseModel):
    times: list[float] = Field(default_factory=list)
    norms: list[float] = Field(default_factory=list)
    r_means: list[float] = Field(default_factory=list)
    r_spreads: list[float] = Field(default_factory=list)
    overlaps: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _consistent(self):
        n = len(self.times)
        if any(len(seq) != n for seq in (self.norms, self.r_means, self.r_spreads, self.overlaps)):
            raise ValueError("record sequences must have equal lengths")
        steps = np.diff(self.times)
        if n > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("record times must be strictly monotone")
        return self


class RunConfig(BaseModel):
    command: Literal["params", "profile", "check", "observables", "evolve", "fit", "plot"]
    gamma: Optional[float] = None
    beta_tilde: Optional[float] = None
    ell: Optional[int] = None
    hbar: float = Field(default=1.0, gt=0)
    mass: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _one_strength(self):
        if self.gamma is not None and (self.beta_tilde is not None or self.ell not in (None, 0)):
            raise ValueError("give either --gamma or --beta-tilde/--ell, not both")
        return self

    def strength(self) -> tuple[float, int]:
        """(beta_tilde, ell) with --gamma read as beta_tilde at ell = 0."""
        if self.gamma is not None:
            return self.gamma, 0
        if self.beta_tilde is None:
            raise ValueError("one of --gamma or --beta-tilde is required")
        return self.beta_tilde, self.ell or 0
