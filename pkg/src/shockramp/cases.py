"""Synthetic experiments: a case description turned into profiles plus truth."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import AnalysisConfig, HugoniotState, LoadingPath, SoundSpeedRelation
from .errors import ConfigError
from .oracle.eos import MaterialModel, murnaghan_relation_exact
from .oracle.hydro import DriveProgram, HydroResult, run_hydro
from .oracle.moc import forward_characteristics
from .shock import HugoniotModel

N_REF = 4001
# noise level used with a seed when the case gives none, relative to u_max
NOISE_FRACTION = 1e-3


@dataclass(frozen=True)
class LinearRelation:
    """c_L = c0 (1 + beta a) on the principal path of a material at rest."""

    c0: float
    beta: float

    def __call__(self, a):
        return self.c0 * (1.0 + self.beta * np.asarray(a, dtype=float))

    def path(self, rho0: float, a_max: float, n: int = N_REF) -> LoadingPath:
        a = np.linspace(0.0, a_max, n)
        c = self(a)
        P = rho0 * self.c0 * (a + 0.5 * self.beta * a * a)
        if self.beta == 0:
            V = 1.0 / rho0 - a / (rho0 * self.c0)
        else:
            V = 1.0 / rho0 - np.log1p(self.beta * a) / (rho0 * self.c0 * self.beta)
        return LoadingPath(a=a, cL=c, up=a, P=P, rho=1.0 / V)


@dataclass
class SynthCase:
    material: MaterialModel
    drive: DriveProgram
    thicknesses: tuple
    generator: str = "hydro"
    cells: int = 400
    length: float = 30.0
    cfl: float = 0.4
    q_quad: float = 2.0
    q_lin: float = 0.1
    dt_out: float = 0.002
    dt_fixed: Optional[float] = None
    tail: float = 1.0
    record_speed: Optional[float] = None
    n_waves: int = 1000
    relation: Optional[LinearRelation] = None
    noise_sigma: float = 0.0
    analysis: AnalysisConfig = AnalysisConfig()
    name: str = "case"

    @classmethod
    def from_dict(cls, d: dict) -> "SynthCase":
        mesh = d.get("mesh", {})
        rel = d.get("relation")
        return cls(
            material=MaterialModel.from_dict(d["material"]),
            drive=DriveProgram.from_dict(d["drive"]),
            thicknesses=tuple(float(h) for h in d["thicknesses"]),
            generator=d.get("generator", "hydro"),
            cells=int(mesh.get("cells", 400)),
            length=float(mesh.get("length", 30.0)),
            cfl=float(mesh.get("cfl", 0.4)),
            q_quad=float(mesh.get("q_quad", 2.0)),
            q_lin=float(mesh.get("q_lin", 0.1)),
            dt_out=float(mesh.get("dt_out", 0.002)),
            dt_fixed=None if mesh.get("dt") is None else float(mesh["dt"]),
            tail=float(d.get("tail", 1.0)),
            record_speed=None if d.get("record_speed") is None else float(d["record_speed"]),
            n_waves=int(d.get("n_waves", 1000)),
            relation=None if rel is None else LinearRelation(float(rel["c0"]), float(rel["beta"])),
            noise_sigma=float(d.get("noise_sigma", 0.0)),
            analysis=analysis_config(d.get("analysis", {})),
            name=d.get("name", "case"),
        )

    @property
    def shocked(self) -> bool:
        return self.drive.u_jump > 0

    def t_end(self, H: float) -> float:
        """Record length: the slowest wave of the drive crosses H, plus a tail."""
        mat = self.material
        c_slow = np.sqrt(mat.K0 / mat.rho0)
        if self.relation is not None:
            c_slow = self.relation.c0
        if self.record_speed is not None:
            c_slow = self.record_speed
        return self.drive.t_end + H / c_slow + self.tail


def analysis_config(d: dict) -> AnalysisConfig:
    kw = dict(d)
    if kw.get("rhoR_bracket") is not None:
        kw["rhoR_bracket"] = tuple(kw["rhoR_bracket"])
    try:
        return AnalysisConfig(**kw)
    except TypeError as exc:
        raise ConfigError(f"bad analysis settings: {exc}")


@dataclass
class SynthResult:
    profiles: list
    reference: LoadingPath
    truth: Optional[HugoniotState]
    hugoniot: Optional[HugoniotModel]
    hydro: Optional[HydroResult] = None

    @property
    def compare_rho_min(self) -> float:
        if self.truth is not None:
            return self.truth.rhoH
        return float(self.reference.rho[0])


def synthesize(case: SynthCase, seed: Optional[int] = None, executor=None) -> SynthResult:
    mat = case.material
    hydro = None
    if case.generator == "hydro":
        hydro = run_hydro(mat, case.drive, case.cells, case.length, case.thicknesses,
                          case.t_end, executor=executor, cfl=case.cfl, q_quad=case.q_quad,
                          q_lin=case.q_lin, dt_out=case.dt_out, dt_fixed=case.dt_fixed)
        profiles = hydro.profiles
    elif case.generator == "characteristics":
        if case.shocked:
            raise ConfigError("the characteristics generator handles shock-free drives only")
        rel = case.relation or (lambda a: murnaghan_relation_exact(mat, a))
        profiles = [forward_characteristics(rel, case.drive, H, case.n_waves,
                                            t_end=case.t_end(H)) for H in case.thicknesses]
    else:
        raise ConfigError(f"unknown generator {case.generator!r}")

    if seed is not None:
        # noise is opt-in through the seed so that unseeded runs stay reproducible
        sigma = case.noise_sigma or NOISE_FRACTION * case.drive.u_max
        rng = np.random.default_rng(seed)
        profiles = [p.with_velocity(np.maximum(p.u + rng.normal(0.0, sigma, p.u.size), 0.0))
                    for p in profiles]

    truth, hug = None, None
    if case.shocked:
        truth = mat.hugoniot_state(case.drive.u_jump)
        up, us = mat.hugoniot_table(1.5 * case.drive.u_max, 300)
        hug = HugoniotModel("table", up=tuple(up), us=tuple(us))
        reference = mat.shocked_isentrope(truth, rho_max=_rho_cap(mat, truth, case), n=N_REF)
    elif case.relation is not None:
        reference = case.relation.path(mat.rho0, case.drive.u_max * 1.05)
    else:
        reference = mat.principal_isentrope(_rho_cap(mat, None, case), n=N_REF)
    return SynthResult(profiles=profiles, reference=reference, truth=truth, hugoniot=hug,
                       hydro=hydro)


def _rho_cap(mat: MaterialModel, truth: Optional[HugoniotState], case: SynthCase) -> float:
    """A density comfortably above the peak reached by the drive."""
    if truth is None:
        c = mat.principal_isentrope(mat.rho0 * 3.0, n=N_REF)
        u_top = case.drive.u_max
    else:
        c = mat.shocked_isentrope(truth, rho_max=truth.rhoH * 2.0, n=N_REF)
        u_top = case.drive.u_max - truth.UH + truth.aH
    k = int(np.searchsorted(c.a, 1.1 * u_top))
    return max(float(c.rho[min(k, c.rho.size - 1)]), 1.01 * float(c.rho[0]))


def with_mode(cfg: AnalysisConfig, mode: int) -> AnalysisConfig:
    return replace(cfg, mode=mode)


def relation_reference(ref: LoadingPath) -> SoundSpeedRelation:
    return SoundSpeedRelation(a_tab=ref.a, cL_tab=ref.cL)
