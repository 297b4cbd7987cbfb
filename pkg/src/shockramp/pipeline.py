"""End-to-end analysis: profiles in, relation and loading path out."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .chars import IterResult, iterate
from .core import AnalysisConfig, HugoniotState, LoadingPath, SoundSpeedRelation, VelocityProfile
from .errors import ConfigError
from .ingest import LevelSet, detect_breakout, extract_levels
from .shock import HugoniotModel, RhoRSearch, center_fan, find_rhoR, measure_shock, modify_profile
from .thermo import ErrorReport, integrate_from_ambient, integrate_from_hugoniot, pressure_error, trim_path

log = logging.getLogger(__name__)

MODE_NAMES = {1: "shock-free", 2: "shock-free from Hugoniot", 3: "shock-aware"}


@dataclass
class AnalysisResult:
    mode: int
    relation: SoundSpeedRelation
    path: LoadingPath
    levels: LevelSet
    iteration: IterResult
    state: Optional[HugoniotState] = None
    breakouts: list = field(default_factory=list)
    rhoR_search: Optional[RhoRSearch] = None
    error: Optional[ErrorReport] = None
    anchor: Optional[float] = None

    def summary(self) -> dict:
        out = {
            "mode": self.mode,
            "mode_name": MODE_NAMES[self.mode],
            "n_levels": int(self.levels.M),
            "iterations": int(self.iteration.n_iter),
            "final_residual": float(self.iteration.residuals[-1]),
            "thicknesses_um": self.levels.thicknesses.tolist(),
            "a_max_km_s": self.relation.a_max,
            "rho_max_g_cm3": float(self.path.rho.max()),
            "P_max_GPa": float(self.path.P.max()),
        }
        if self.breakouts:
            out["breakouts"] = [{"t_bo_ns": b.t_bo, "u_bo_km_s": b.u_bo,
                                 "rise_start_ns": b.rise_start} for b in self.breakouts]
        if self.state is not None:
            out["hugoniot"] = self.state.to_dict()
        if self.anchor is not None:
            # mode 2 places the Hugoniot point at a = u_bo / 2 on the shock-free axis
            out["anchor"] = {"a_km_s": self.anchor, "convention": "mean u_bo / 2"}
        if self.relation.shock_aware:
            out["release"] = {"cLR_km_s": self.relation.cLR, "beta_per_km_s": self.relation.beta,
                              "junction_mismatch_km_s": self.relation.junction_mismatch()}
        if self.rhoR_search is not None:
            out["rhoR_search"] = {"rhoR": self.rhoR_search.rhoR,
                                  "g": self.rhoR_search.mismatch,
                                  "trials": self.rhoR_search.trials}
        if self.error is not None:
            out["error"] = self.error.to_dict()
        return out


def shock_state(profiles: Sequence[VelocityProfile], cfg: AnalysisConfig, rho0: float,
                hugoniot: Optional[HugoniotModel] = None,
                state: Optional[HugoniotState] = None):
    """Breakouts of every profile plus the Hugoniot state they imply.

    A state given directly takes precedence over the measured one.
    """
    breakouts = [detect_breakout(p, cfg) for p in profiles]
    if state is None:
        if hugoniot is None:
            raise ConfigError("shock treatment needs a Hugoniot model or a direct state")
        state = measure_shock([p.thickness for p in profiles], breakouts, rho0, hugoniot)
    return breakouts, state


def analyze(profiles: Sequence[VelocityProfile], cfg: AnalysisConfig, rho0: float,
            hugoniot: Optional[HugoniotModel] = None, state: Optional[HugoniotState] = None,
            reference: Optional[LoadingPath] = None, rho_min_compare: Optional[float] = None,
            executor=None) -> AnalysisResult:
    """Run one analysis mode on a set of profiles."""
    profiles = sorted(profiles, key=lambda p: p.thickness)
    breakouts: list = []
    search = None
    anchor = None
    if cfg.mode in (2, 3):
        breakouts, state = shock_state(profiles, cfg, rho0, hugoniot, state)
    if cfg.mode in (1, 2):
        levels = extract_levels(profiles, cfg.n_levels, cfg.u_floor, cfg.envelope,
                                cfg.smooth_width)
        it = iterate(levels, cfg, executor=executor)
        rel = it.relation
        if cfg.mode == 1:
            path = integrate_from_ambient(rel, rho0)
        else:
            anchor = 0.5 * float(np.mean([b.u_bo for b in breakouts]))
            path = integrate_from_hugoniot(rel, state, anchor=anchor)
    else:
        mod = [modify_profile(p, state, b.u_bo, cfg.stretch) for p, b in zip(profiles, breakouts)]
        levels = extract_levels(mod, cfg.n_levels, state.u_base, cfg.envelope, cfg.smooth_width)
        levels = center_fan(levels, state, breakouts)
        if cfg.rhoR is not None:
            state = state.with_rhoR(cfg.rhoR)
            it = iterate(levels, cfg, state=state, executor=executor)
        else:
            search = find_rhoR(levels, state, cfg, executor=executor)
            state = state.with_rhoR(search.rhoR)
            it = search.result
        rel = it.relation
        path = integrate_from_hugoniot(rel, state)
    if cfg.rho_max is not None:
        path = trim_path(path, cfg.rho_max)
    err = None
    if reference is not None:
        err = pressure_error(path, reference, rho_max=cfg.rho_max, rho_min=rho_min_compare)
    log.info("mode %d: %d iterations, err=%s", cfg.mode, it.n_iter,
             "n/a" if err is None else f"{err.err:.4g}")
    return AnalysisResult(mode=cfg.mode, relation=rel, path=path, levels=levels, iteration=it,
                          state=state, breakouts=breakouts, rhoR_search=search, error=err,
                          anchor=anchor)
