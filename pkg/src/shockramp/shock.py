"""Shock-state measurement, release closure and profile modification."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import AnalysisConfig, HugoniotState, VelocityProfile
from .errors import (
    BreakoutMismatch,
    ConfigError,
    HugoniotOutOfRange,
    InconsistentBreakouts,
    NoSignChange,
    NoStiffeningRoot,
    NotConverged,
    TangledNet,
)
from .ingest import BreakoutInfo, LevelSet

log = logging.getLogger(__name__)

# relative spread of breakout velocities tolerated across thicknesses
BREAKOUT_SPREAD = 0.03
# relative mismatch between u_bo and U_H + a_H tolerated by modify_profile
BREAKOUT_MISMATCH = 0.05
CLOSURE_TOL = 1e-12


@dataclass(frozen=True)
class HugoniotModel:
    """Material Hugoniot in the U_s - u_p plane.

    ``kind`` is ``"linear"`` (U_s = c0 + s u_p) or ``"table"`` with paired
    ``up``/``us`` samples, U_s strictly increasing.
    """

    kind: str
    c0: float = float("nan")
    s: float = float("nan")
    up: tuple = ()
    us: tuple = ()

    def __post_init__(self):
        if self.kind == "linear":
            if not (self.c0 > 0 and self.s > 0):
                raise ConfigError("linear Hugoniot needs c0 > 0 and s > 0")
        elif self.kind == "table":
            up, us = np.asarray(self.up, float), np.asarray(self.us, float)
            if up.size < 2 or up.shape != us.shape:
                raise ConfigError("Hugoniot table needs >= 2 matching (up, us) pairs")
            if np.any(np.diff(us) <= 0) or np.any(np.diff(up) <= 0):
                raise ConfigError("Hugoniot table must increase in both up and us")
            object.__setattr__(self, "up", tuple(up.tolist()))
            object.__setattr__(self, "us", tuple(us.tolist()))
        else:
            raise ConfigError(f"unknown Hugoniot kind {self.kind!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "HugoniotModel":
        if d.get("kind") == "table":
            return cls("table", up=tuple(d["up"]), us=tuple(d["us"]))
        return cls("linear", c0=float(d["c0"]), s=float(d["s"]))

    def to_dict(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear", "c0": self.c0, "s": self.s}
        return {"kind": "table", "up": list(self.up), "us": list(self.us)}

    def up_from_us(self, Us: float) -> float:
        if self.kind == "linear":
            up = (Us - self.c0) / self.s
            if not up > 0:
                raise HugoniotOutOfRange(
                    f"shock speed {Us:.4g} km/s is below the bulk sound speed c0={self.c0:.4g}")
            return float(up)
        if not self.us[0] <= Us <= self.us[-1]:
            raise HugoniotOutOfRange(
                f"shock speed {Us:.4g} km/s outside the Hugoniot table "
                f"[{self.us[0]:.4g}, {self.us[-1]:.4g}]")
        return float(np.interp(Us, self.us, self.up))


def state_from_jump(rho0: float, Us: float, UH: float, aH: float) -> HugoniotState:
    """Hugoniot state from the jump conditions for a shock into rest."""
    if not Us > UH > 0:
        raise HugoniotOutOfRange(f"need Us > UH > 0, got Us={Us:.4g}, UH={UH:.4g}")
    if not aH > 0:
        raise HugoniotOutOfRange(
            f"breakout velocity below U_H={UH:.4g} km/s gives a_H={aH:.4g} <= 0")
    return HugoniotState(rho0=rho0, Us=Us, UH=UH, PH=rho0 * Us * UH,
                         rhoH=rho0 * Us / (Us - UH), aH=aH)


def measure_shock(thicknesses: Sequence[float], breakouts: Sequence[BreakoutInfo],
                  rho0: float, hugoniot: HugoniotModel) -> HugoniotState:
    """Shock state from breakout times and velocities.

    U_s is the least-squares slope of thickness against breakout time, U_H
    follows from the Hugoniot model and a_H = <u_bo> - U_H.
    """
    h = np.asarray(thicknesses, dtype=float)
    tb = np.array([b.t_bo for b in breakouts])
    ub = np.array([b.u_bo for b in breakouts])
    if h.size < 2 or np.ptp(h) <= 0:
        raise InconsistentBreakouts("shock speed needs at least two distinct thicknesses")
    spread = float(np.ptp(ub) / np.mean(ub))
    if spread > BREAKOUT_SPREAD:
        raise InconsistentBreakouts(
            f"breakout velocities {np.round(ub, 4).tolist()} km/s differ by "
            f"{100 * spread:.1f}% (limit {100 * BREAKOUT_SPREAD:.0f}%)")
    Us = float(np.polyfit(tb, h, 1)[0])
    if not Us > 0 or np.any(np.diff(tb[np.argsort(h)]) <= 0):
        raise InconsistentBreakouts(
            f"breakout times {np.round(tb, 4).tolist()} ns do not increase with thickness")
    UH = hugoniot.up_from_us(Us)
    return state_from_jump(rho0, Us, UH, float(np.mean(ub)) - UH)


# -- linear release closure -------------------------------------------------

@dataclass(frozen=True)
class ReleaseParams:
    K: float
    y: float
    beta: float
    cLR: float


def closure_function(y):
    """(1/y + 1/2) ln(1 + y), continued to 1 at y = 0."""
    y = float(y)
    if abs(y) < 1e-8:
        return 1.0 + y * y / 12.0
    return (1.0 / y + 0.5) * math.log1p(y)


def closure_K(state: HugoniotState, rhoR: float) -> float:
    return state.PH / state.aH ** 2 * (1.0 / rhoR - 1.0 / state.rhoH)


def rhoR_limit(state: HugoniotState) -> float:
    """Largest released density for which the closure has a stiffening root."""
    return 1.0 / (1.0 / state.rhoH + state.aH ** 2 / state.PH)


def solve_release_params(state: HugoniotState, rhoR: float,
                         branch: str = "positive") -> ReleaseParams:
    """Slope of the linear release segment c_L = c_LR (1 + beta a) on [0, a_H].

    The segment must reproduce both P_H and the release density, which
    reduces to f(beta a_H) = K for the closure function f; the root is
    bracketed and bisected to |f - K| < 1e-12.
    """
    K = closure_K(state, rhoR)
    if not K > 1.0:
        raise NoStiffeningRoot(
            f"released density {rhoR:.5g} g/cm^3 gives K={K:.6g} <= 1; need "
            f"rho_R < {rhoR_limit(state):.5g} for a stiffening release segment")
    if branch == "positive":
        lo, hi = 0.0, 1.0
        while closure_function(hi) < K:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise NoStiffeningRoot(f"no closure root for K={K:.6g}")
    elif branch == "negative":
        lo, hi = -1.0 + 1e-15, 0.0
    else:
        raise ConfigError(f"unknown closure branch {branch!r}")

    # f - K changes sign on [lo, hi]; orient so that f(a) < K < f(b)
    a, b = (lo, hi) if branch == "positive" else (hi, lo)
    y = 0.5 * (a + b)
    for _ in range(4000):
        y = 0.5 * (a + b)
        r = closure_function(y) - K
        if abs(r) < CLOSURE_TOL or y in (a, b):
            break
        if r < 0:
            a = y
        else:
            b = y
    if abs(closure_function(y) - K) >= CLOSURE_TOL:
        # bisection hit the float resolution of y; take the better endpoint
        y = min((a, b), key=lambda v: abs(closure_function(v) - K))
    beta = y / state.aH
    cLR = state.PH / (state.rho0 * state.aH * (1.0 + 0.5 * y))
    return ReleaseParams(K=K, y=y, beta=beta, cLR=cLR)


# -- profile modification ----------------------------------------------------

def modify_profile(p: VelocityProfile, state: HugoniotState, u_bo: Optional[float] = None,
                   stretch: str = "caption") -> VelocityProfile:
    """Recast the shock jump as a centred release from U_H - a_H.

    ``caption`` maps samples below U_H linearly from [0, U_H] onto
    [U_H - a_H, U_H] and leaves the rest alone; ``full`` maps [0, u_bo] onto
    [U_H - a_H, U_H + a_H].  A profile already based at U_H - a_H is
    returned unchanged.
    """
    base = state.u_base
    if p.u_base == base:
        return p
    if p.u_base != 0.0:
        raise ConfigError(f"{p.label!r} was modified for a different shock state")
    top = state.UH + state.aH
    if u_bo is not None and abs(u_bo - top) > BREAKOUT_MISMATCH * top:
        raise BreakoutMismatch(
            f"{p.label!r}: breakout velocity {u_bo:.4g} km/s differs from "
            f"U_H + a_H = {top:.4g} km/s by more than {100 * BREAKOUT_MISMATCH:.0f}%")
    u = np.array(p.u)
    if stretch == "caption":
        m = u < state.UH
        u[m] = base + u[m] * (state.aH / state.UH)
    elif stretch == "full":
        if u_bo is None:
            raise ConfigError("full stretch needs the breakout velocity")
        m = u < u_bo
        u[m] = base + u[m] * (2.0 * state.aH / u_bo)
    else:
        raise ConfigError(f"unknown stretch {stretch!r}")
    return VelocityProfile(p.thickness, p.t, u, p.label, base)


def center_fan(levels: LevelSet, state: HugoniotState,
               breakouts: Sequence[BreakoutInfo]) -> LevelSet:
    """Let every level below a_H arrive at its profile's breakout time.

    Shock breakout releases as a fan centred on one point of the free
    surface.  The recorded jump is smeared by the finite rise time, which
    would otherwise place the fan levels on unphysical backward paths.
    """
    a = 0.5 * (levels.u_levels - state.u_base)
    fan = a < state.aH
    t = np.array(levels.t_arrival)
    order = np.argsort(levels.thicknesses)
    for row, b in zip(order, [breakouts[k] for k in order]):
        t[row, fan] = b.t_bo
    return LevelSet(u_levels=levels.u_levels, t_arrival=t, thicknesses=levels.thicknesses)


def a_of_up(up, state: HugoniotState):
    """Velocity coordinate of a state reached by recompression from H."""
    return np.asarray(up, dtype=float) - state.UH + state.aH


# -- released density ------------------------------------------------------

@dataclass
class RhoRSearch:
    rhoR: float
    mismatch: float
    trials: list
    result: object


def rhoR_for_y(state: HugoniotState, y: float) -> float:
    """Released density whose closure root is ``y``."""
    return 1.0 / (1.0 / state.rhoH + closure_function(y) * state.aH ** 2 / state.PH)


def default_bracket(state: HugoniotState, c_target: float) -> tuple:
    """Released-density bracket around the continuity estimate.

    ``c_target`` is the table value at a_H.  The linear segment meets it
    for y* = 2 (r - 1) / (2 - r), r = c_target rho0 a_H / P_H; the bracket
    spans y in [y* / 2, 2 y* + 1/2] to allow for the dependence of the
    table itself on rho_R.
    """
    r = c_target * state.rho0 * state.aH / state.PH
    if not 1.0 < r < 2.0:
        raise NoSignChange(
            f"c_L(a_H+) = {c_target:.4g} km/s lies outside the reach "
            f"({state.PH / (state.rho0 * state.aH):.4g}, "
            f"{2 * state.PH / (state.rho0 * state.aH):.4g}) of the linear release segment",
            float("nan"), float("nan"))
    y = 2.0 * (r - 1.0) / (2.0 - r)
    return rhoR_for_y(state, 2.0 * y + 0.5), rhoR_for_y(state, 0.5 * y)


def find_rhoR(levels, state: HugoniotState, cfg: AnalysisConfig,
              executor=None) -> RhoRSearch:
    """Bisect the released density until the relation is continuous at a_H.

    Each trial runs the shock-aware characteristics iteration, warm-started
    from the previous trial's table, and evaluates the junction mismatch
    g = c_L(a_H-) - c_L(a_H+) in km/s.
    """
    from .chars import iterate

    trials = []
    warm = None

    def g(rhoR):
        nonlocal warm
        try:
            res = iterate(levels, cfg, state=state.with_rhoR(rhoR), warm=warm,
                          executor=executor)
        except TangledNet as exc:
            # a release segment faster than the ramp just above a_H lets the
            # fan overtake it: the sign of a positive junction mismatch
            trials.append({"rhoR": float(rhoR), "g": None, "iterations": 0, "tangled": True})
            log.info("rhoR trial %d: rhoR=%.6f tangled (%s)", len(trials), rhoR, exc)
            return np.inf, None
        warm = res.relation
        rel = res.relation
        mis = rel.junction_mismatch()
        trials.append({"rhoR": float(rhoR), "g": float(mis), "iterations": res.n_iter})
        log.info("rhoR trial %d: rhoR=%.6f g=%.3e (%d iterations)",
                 len(trials), rhoR, mis, res.n_iter)
        return mis, res

    if cfg.rhoR_bracket is not None:
        lo, hi = cfg.rhoR_bracket
    else:
        # a trial with a nearly flat release segment gives the table value at a_H
        probe = rhoR_for_y(state, 1e-3)
        g_probe, r_probe = g(probe)
        if r_probe is None:
            raise TangledNet("characteristic net tangles even for a flat release segment")
        lo = default_bracket(state, float(warm.table(warm.aH)))[0]
        hi = probe
    if not 0 < lo < hi:
        raise ConfigError(f"bad released-density bracket ({lo}, {hi})")

    best = None

    def consider(rhoR, mis, res):
        nonlocal best
        if res is not None and (best is None or abs(mis) < abs(best.mismatch)):
            best = RhoRSearch(float(rhoR), float(mis), trials, res)
        return res is not None and abs(mis) < cfg.tol_rhoR

    g_lo, r_lo = g(lo)
    if consider(lo, g_lo, r_lo):
        return best
    if cfg.rhoR_bracket is None:
        g_hi, r_hi = g_probe, r_probe
    else:
        g_hi, r_hi = g(hi)
    if consider(hi, g_hi, r_hi):
        return best
    if np.sign(g_lo) == np.sign(g_hi):
        raise NoSignChange(
            f"junction mismatch has the same sign at both ends of the released-density "
            f"bracket [{lo:.5g}, {hi:.5g}] (g = {g_lo:.3g}, {g_hi:.3g})", g_lo, g_hi)
    while len(trials) < cfg.max_rhoR_trials and (hi - lo) > 1e-12 * hi:
        mid = 0.5 * (lo + hi)
        g_mid, r_mid = g(mid)
        if consider(mid, g_mid, r_mid):
            return best
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    if best is not None and (hi - lo) <= 1e-12 * hi:
        return best
    raise NotConverged(
        f"released-density search used {len(trials)} trials without reaching "
        f"|g| < {cfg.tol_rhoR:g}"
        + ("" if best is None else f" (best |g| = {abs(best.mismatch):.3g} at rhoR = {best.rhoR:.6g})"),
        state={"trials": trials, "best": best})
