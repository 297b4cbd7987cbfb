"""Material models for the forward generators.

Murnaghan cold curve P_c = (K0/n) ((rho/rho0)**n - 1), optionally with a
Mie-Grueneisen thermal term using rho * Gamma = rho0 * Gamma0.  For that
family the Hugoniot and every isentrope have closed forms, which makes the
model a convenient ground truth.

Specific volumes V are in cm^3/g, specific energies in GPa cm^3/g = (km/s)^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq

from ..core import SHOCK_FREE, HugoniotState, LoadingPath, SoundSpeedRelation
from ..errors import ConfigError


@dataclass(frozen=True)
class MaterialModel:
    kind: str
    rho0: float
    K0: float
    n: float
    Gamma0: float = 0.0
    cv: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("murnaghan", "mie-gruneisen"):
            raise ConfigError(f"unknown material kind {self.kind!r}")
        if not (self.rho0 > 0 and self.K0 > 0 and self.n >= 1):
            raise ConfigError("material needs rho0 > 0, K0 > 0, n >= 1")
        if self.kind == "murnaghan" and self.Gamma0 != 0:
            raise ConfigError("murnaghan material has no Grueneisen term")
        if self.Gamma0 < 0:
            raise ConfigError("Gamma0 must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "MaterialModel":
        return cls(kind=d["kind"], rho0=float(d["rho0"]), K0=float(d["K0"]), n=float(d["n"]),
                   Gamma0=float(d.get("Gamma0", 0.0)), cv=d.get("cv"))

    @property
    def V0(self) -> float:
        return 1.0 / self.rho0

    @property
    def g(self) -> float:
        """Gamma / V, constant for this family."""
        return self.Gamma0 * self.rho0

    # -- cold curve ----------------------------------------------------------

    def cold_pressure(self, V):
        return self.K0 / self.n * ((self.V0 / V) ** self.n - 1.0)

    def cold_energy(self, V):
        V0, n = self.V0, self.n
        if n == 1:
            return self.K0 * (V - V0 - V0 * np.log(V / V0))
        return self.K0 / n * (V0 * ((V0 / V) ** (n - 1) - 1.0) / (n - 1) + (V - V0))

    # -- full EOS ------------------------------------------------------------

    def pressure(self, V, e):
        return self.cold_pressure(V) + self.g * (e - self.cold_energy(V))

    def sound_speed2(self, V, e):
        """Squared Eulerian sound speed (km/s)^2 at (V, e)."""
        thermal = self.g * (e - self.cold_energy(V))
        return V * self.K0 * (self.V0 / V) ** self.n + V * V * self.g * thermal

    # -- principal Hugoniot --------------------------------------------------

    def hugoniot_pressure(self, V):
        den = 1.0 - 0.5 * self.g * (self.V0 - V)
        return (self.cold_pressure(V) - self.g * self.cold_energy(V)) / den

    def hugoniot_state(self, Up: float) -> HugoniotState:
        """Shocked state reached from rest by a shock with particle velocity Up."""
        V0 = self.V0
        lo = V0 * (1 - 1e-12)
        hi = V0 * 0.05
        if self.g > 0:
            hi = max(hi, V0 - 2.0 / self.g * (1 - 1e-9))

        def f(V):
            return self.hugoniot_pressure(V) * (V0 - V) - Up * Up

        V = brentq(f, hi, lo, xtol=1e-15, rtol=1e-14, maxiter=500)
        P = self.hugoniot_pressure(V)
        Us = V0 * np.sqrt(P / (V0 - V))
        e = 0.5 * P * (V0 - V)
        a_H, rho_R = self._release(V, e)
        return HugoniotState(rho0=self.rho0, Us=float(Us), UH=float(Up), PH=float(P),
                             rhoH=float(1.0 / V), aH=float(a_H), rhoR=float(rho_R))

    def hugoniot_table(self, up_max: float, n: int = 200):
        """(Up, Us) samples of the principal Hugoniot on (0, up_max]."""
        ups = np.linspace(up_max / n, up_max, n)
        uss = np.array([self.hugoniot_state(float(u)).Us for u in ups])
        return ups, uss

    # -- isentropes ----------------------------------------------------------

    def isentrope_pressure(self, V, V_ref: float, e_ref: float):
        w = e_ref - self.cold_energy(V_ref)
        return self.cold_pressure(V) + self.g * w * np.exp(-self.g * (V - V_ref))

    def isentrope_sound_speed(self, V, V_ref: float, e_ref: float):
        w = e_ref - self.cold_energy(V_ref)
        c2 = V * self.K0 * (self.V0 / V) ** self.n + V * V * self.g ** 2 * w * np.exp(
            -self.g * (V - V_ref))
        return np.sqrt(c2)

    def release_volume(self, V_ref: float, e_ref: float) -> float:
        """Zero-pressure specific volume on the isentrope through (V_ref, e_ref)."""
        if self.isentrope_pressure(V_ref, V_ref, e_ref) <= 0:
            raise ConfigError("reference state is already at non-positive pressure")
        hi = V_ref * 1.5
        while self.isentrope_pressure(hi, V_ref, e_ref) > 0:
            hi *= 1.5
        return brentq(lambda V: self.isentrope_pressure(V, V_ref, e_ref), V_ref, hi,
                      xtol=1e-15, rtol=1e-14, maxiter=500)

    def _release(self, V_H: float, e_H: float, n: int = 4001):
        V_R = self.release_volume(V_H, e_H)
        V = np.linspace(V_H, V_R, n)
        c = self.isentrope_sound_speed(V, V_H, e_H)
        # a = int_V^{V_R} c / V dV
        a_H = cumulative_simpson(c / V, x=V, initial=0.0)[-1]
        return float(a_H), float(1.0 / V_R)

    def isentrope_path(self, V_ref: float, e_ref: float, rho_max: float,
                       n: int = 4001, rho_min: Optional[float] = None) -> LoadingPath:
        """Exact loading path along the isentrope through (V_ref, e_ref).

        ``a`` is measured from the zero-pressure state of that isentrope
        (or from ``rho_min`` when given) so the path doubles as the true
        sound-speed relation.  ``up`` is the simple-wave particle velocity
        counted from the same origin.
        """
        rho_lo = 1.0 / self.release_volume(V_ref, e_ref) if rho_min is None else rho_min
        rho = np.linspace(rho_lo, rho_max, n)
        V = 1.0 / rho
        c = self.isentrope_sound_speed(V, V_ref, e_ref)
        a = cumulative_simpson(c / rho, x=rho, initial=0.0)
        P = self.isentrope_pressure(V, V_ref, e_ref)
        cL = c * rho / self.rho0
        return LoadingPath(a=a, cL=cL, up=a.copy(), P=P, rho=rho)

    def principal_isentrope(self, rho_max: float, n: int = 4001) -> LoadingPath:
        return self.isentrope_path(self.V0, 0.0, rho_max, n=n, rho_min=self.rho0)

    def shocked_isentrope(self, state: HugoniotState, rho_max: float,
                          n: int = 4001) -> LoadingPath:
        V_H = 1.0 / state.rhoH
        e_H = 0.5 * state.PH * (self.V0 - V_H)
        return self.isentrope_path(V_H, e_H, rho_max, n=n)


def relation_from_path(path: LoadingPath) -> SoundSpeedRelation:
    """Tabulated shock-free relation c_L(a) from an exact path."""
    return SoundSpeedRelation(a_tab=path.a, cL_tab=path.cL, mode=SHOCK_FREE)


def murnaghan_relation_exact(mat: MaterialModel, a):
    """Closed-form c_L(a) on the principal isentrope of a Murnaghan solid."""
    c0 = np.sqrt(mat.K0 / mat.rho0)
    a = np.asarray(a, dtype=float)
    if mat.n == 1:
        return c0 * np.exp(a / c0)
    return c0 * (1.0 + 0.5 * (mat.n - 1) * a / c0) ** ((mat.n + 1) / (mat.n - 1))
