"""Domain types shared across the toolkit.

Units are fixed globally: time in ns, Lagrangian position in um, velocity in
km/s (= um/ns), density in g/cm^3 and stress in GPa.  With this choice
rho * u**2 comes out in GPa directly, so none of the formulas carry hidden
conversion factors.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import (
    ConfigError,
    NegativeVelocity,
    NonFiniteSample,
    NonMonotonicTime,
    TooFewSamples,
)

MIN_SAMPLES = 16
# negative abscissae down to this are rounding noise and get clamped to zero
A_CLAMP = -1e-9

SHOCK_FREE = "shock-free"
SHOCK_AWARE = "shock-aware"


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.flags.writeable = False
    return arr


def clamp_abscissa(a):
    """Clamp tiny negative ``a`` values to zero, reject larger ones."""
    a = np.asarray(a, dtype=float)
    if np.any(a < A_CLAMP):
        raise ValueError(f"negative isentropic velocity coordinate {a.min():.3e} km/s")
    return np.maximum(a, 0.0)


@dataclass(frozen=True)
class VelocityProfile:
    thickness: float
    t: np.ndarray
    u: np.ndarray
    label: str = ""
    # velocity the record starts from: 0 for raw data, U_H - a_H once the
    # shock jump has been recast as a release fan
    u_base: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen(self.t))
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "thickness", float(self.thickness))
        object.__setattr__(self, "u_base", float(self.u_base))

    def with_velocity(self, u) -> "VelocityProfile":
        return replace(self, u=u)


def validate_profile(p: VelocityProfile) -> VelocityProfile:
    """Check the profile invariants and return a cleaned copy.

    Rows repeated exactly (same ``t`` and same ``u``) are collapsed; a
    repeated timestamp carrying a different velocity is an error.
    """
    t, u = p.t, p.u
    if t.ndim != 1 or t.shape != u.shape:
        raise TooFewSamples(f"{p.label!r}: t and u must be 1-D arrays of equal length")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(u))):
        raise NonFiniteSample(f"{p.label!r}: profile contains non-finite samples")
    if t.size > 1:
        dt = np.diff(t)
        dup = (dt == 0) & (np.diff(u) == 0)
        if np.any(dup):
            keep = np.concatenate([[True], ~dup])
            t, u = t[keep], u[keep]
            dt = np.diff(t)
        if np.any(dt <= 0):
            k = int(np.argmax(dt <= 0))
            raise NonMonotonicTime(
                f"{p.label!r}: time not strictly increasing at sample {k + 1} (t={t[k + 1]})")
    if t.size < MIN_SAMPLES:
        raise TooFewSamples(f"{p.label!r}: {t.size} samples, need at least {MIN_SAMPLES}")
    if np.any(u < min(0.0, p.u_base)):
        raise NegativeVelocity(f"{p.label!r}: negative free-surface velocity {u.min():.4g}")
    if not p.thickness > 0:
        raise ConfigError(f"{p.label!r}: thickness must be positive")
    return VelocityProfile(p.thickness, t, u, p.label, p.u_base)


@dataclass(frozen=True)
class HugoniotState:
    rho0: float
    Us: float
    UH: float
    PH: float
    rhoH: float
    aH: float
    rhoR: float = float("nan")

    def __post_init__(self):
        if not self.rho0 > 0:
            raise ConfigError("rho0 must be positive")
        if not self.rhoH > self.rho0:
            raise ConfigError(f"rhoH={self.rhoH} must exceed rho0={self.rho0}")
        if not self.PH > 0:
            raise ConfigError("PH must be positive")
        if not self.Us > self.UH > 0:
            raise ConfigError(f"need Us > UH > 0, got Us={self.Us}, UH={self.UH}")
        if not self.aH > 0:
            raise ConfigError(f"aH must be positive, got {self.aH}")
        if not np.isnan(self.rhoR) and not (0 < self.rhoR < self.rhoH):
            raise ConfigError(f"rhoR={self.rhoR} must lie in (0, rhoH)")

    @property
    def u_base(self) -> float:
        """Left-going Riemann invariant u - a of the shocked state."""
        return self.UH - self.aH

    def with_rhoR(self, rhoR: float) -> "HugoniotState":
        return replace(self, rhoR=float(rhoR))

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in
                ("rho0", "Us", "UH", "PH", "rhoH", "aH", "rhoR")}


@dataclass(frozen=True)
class SoundSpeedRelation:
    """Lagrangian sound speed as a function of the velocity coordinate a.

    Above ``aH`` (or everywhere, in shock-free mode) the relation is the
    piecewise-linear interpolant of the table, held flat beyond its ends.
    In shock-aware mode the part below ``aH`` is the analytic release
    segment ``cLR * (1 + beta * a)``.
    """

    a_tab: np.ndarray
    cL_tab: np.ndarray
    mode: str = SHOCK_FREE
    aH: float = 0.0
    cLR: float = float("nan")
    beta: float = float("nan")

    def __post_init__(self):
        object.__setattr__(self, "a_tab", _frozen(self.a_tab))
        object.__setattr__(self, "cL_tab", _frozen(self.cL_tab))
        if self.mode not in (SHOCK_FREE, SHOCK_AWARE):
            raise ConfigError(f"unknown relation mode {self.mode!r}")
        if self.a_tab.size == 0 or self.a_tab.shape != self.cL_tab.shape:
            raise ConfigError("relation table must be non-empty with matching shapes")
        if np.any(np.diff(self.a_tab) <= 0):
            raise ConfigError("relation a_tab must be strictly increasing")
        if not np.all(self.cL_tab > 0):
            raise ConfigError("relation cL_tab must be positive")
        if self.mode == SHOCK_AWARE:
            if not (self.cLR > 0 and np.isfinite(self.beta)):
                raise ConfigError("shock-aware relation needs cLR > 0 and finite beta")
            if self.a_tab[0] < self.aH - 1e-12:
                raise ConfigError("shock-aware table must start at or above aH")

    @property
    def shock_aware(self) -> bool:
        return self.mode == SHOCK_AWARE

    def linear(self, a):
        return self.cLR * (1.0 + self.beta * np.asarray(a, dtype=float))

    def table(self, a):
        return np.interp(a, self.a_tab, self.cL_tab)

    def __call__(self, a):
        a = clamp_abscissa(a)
        c = self.table(a)
        if self.shock_aware:
            c = np.where(a < self.aH, self.linear(a), c)
        return c if c.ndim else float(c)

    def junction_mismatch(self) -> float:
        """c_L(aH-) - c_L(aH+) for a shock-aware relation."""
        return float(self.linear(self.aH) - self.table(self.aH))

    @property
    def a_max(self) -> float:
        return float(self.a_tab[-1])

    def with_table(self, a_tab, cL_tab) -> "SoundSpeedRelation":
        return replace(self, a_tab=a_tab, cL_tab=cL_tab)


@dataclass(frozen=True)
class LoadingPath:
    a: np.ndarray
    cL: np.ndarray
    up: np.ndarray
    P: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        for name in ("a", "cL", "up", "P", "rho"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def __len__(self):
        return self.a.size


@dataclass(frozen=True)
class AnalysisConfig:
    mode: int = 3
    n_levels: int = 200
    tol_cl: float = 1e-6
    max_iter: int = 200
    relax: float = 1.0
    tol_rhoR: float = 1e-3
    breakout_frac: float = 0.5
    rho_max: Optional[float] = None
    # extras beyond the core set
    u_floor: float = 0.0
    rhoR: Optional[float] = None
    rhoR_bracket: Optional[tuple] = None
    max_rhoR_trials: int = 40
    stretch: str = "caption"
    beta_branch: str = "positive"
    smooth_width: int = 0
    ramp_margin: float = 0.02
    stall_window: int = 10
    envelope: str = "last"

    def __post_init__(self):
        if self.mode not in (1, 2, 3):
            raise ConfigError(f"mode must be 1, 2 or 3, got {self.mode}")
        if self.n_levels < 8:
            raise ConfigError("n_levels must be >= 8")
        for name in ("tol_cl", "tol_rhoR", "breakout_frac"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.relax <= 1:
            raise ConfigError("relax must lie in (0, 1]")
        if not 0 < self.breakout_frac < 1:
            raise ConfigError("breakout_frac must lie in (0, 1)")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.stretch not in ("caption", "full"):
            raise ConfigError("stretch must be 'caption' or 'full'")
        if self.beta_branch not in ("positive", "negative"):
            raise ConfigError("beta_branch must be 'positive' or 'negative'")
        if self.envelope not in ("last", "max"):
            raise ConfigError("envelope must be 'last' or 'max'")
        if not 0 <= self.ramp_margin < 1:
            raise ConfigError("ramp_margin must lie in [0, 1)")
        if self.smooth_width < 0:
            raise ConfigError("smooth_width must be >= 0")

    def replace(self, **kw) -> "AnalysisConfig":
        return replace(self, **kw)
