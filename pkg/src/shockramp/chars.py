"""Backward characteristics: from free-surface arrivals to c_L(a).

Levels u_0 < u_1 < ... < u_{M-1} of the free-surface velocity label the
waves.  Compression wave j meets the free surface at the arrival time of
level j and reflects; node (j, i), i <= j, is where compression wave j
crosses the reflection of wave i.  Its state follows from the two
invariants alone,

    u = (u_j + u_i) / 2,    a = (u_j - u_i) / 2,

so the sound speed at every node is known before the geometry and each
node position is an explicit two-line intersection.  Tracing wave j back
to the loading plane h = 0 gives its launch time; the arrival time it
would have had without reflections is then launch + H / c_L(a_j), and
c_L(a_j) is refitted from those corrected times across thicknesses until
the table stops changing.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import SHOCK_AWARE, SHOCK_FREE, AnalysisConfig, HugoniotState, SoundSpeedRelation
from .errors import ConfigError, DegenerateFit, NotConverged, TangledNet
from .ingest import LevelSet

log = logging.getLogger(__name__)


def riemann_node(u_ii, u_jj):
    """Particle velocity and velocity coordinate where two waves cross.

    ``u_ii`` and ``u_jj`` are the free-surface levels of the reflected and
    the compression wave, ``u_ii <= u_jj``.
    """
    u_ii = np.asarray(u_ii, dtype=float)
    u_jj = np.asarray(u_jj, dtype=float)
    if np.any(u_ii > u_jj):
        raise ValueError("riemann_node needs u_ii <= u_jj")
    return 0.5 * (u_ii + u_jj), 0.5 * (u_jj - u_ii)


@dataclass
class Net:
    """Characteristic net of one sample; arrays are indexed [j, i], i <= j."""

    H: float
    u_levels: np.ndarray
    h: np.ndarray
    t: np.ndarray
    a: np.ndarray
    c: np.ndarray
    launch: np.ndarray

    @property
    def physical(self) -> np.ndarray:
        """Nodes inside the sample (h >= 0)."""
        return np.tril(np.ones_like(self.h, dtype=bool)) & (self.h >= 0)

    def to_dict(self) -> dict:
        j, i = np.nonzero(self.physical)
        u = 0.5 * (self.u_levels[j] + self.u_levels[i])
        return {
            "thickness_um": float(self.H),
            "levels_km_s": self.u_levels.tolist(),
            "launch_ns": self.launch.tolist(),
            "nodes": {
                "j": j.tolist(), "i": i.tolist(),
                "h_um": self.h[j, i].tolist(), "t_ns": self.t[j, i].tolist(),
                "u_km_s": u.tolist(), "a_km_s": self.a[j, i].tolist(),
                "cL_km_s": self.c[j, i].tolist(),
            },
        }


def build_net(u_levels: np.ndarray, t_surface: np.ndarray, H: float,
              relation: SoundSpeedRelation) -> Net:
    """Trace the net of one sample backwards from its free-surface arrivals.

    Nodes are filled one anti-diagonal d = j - i at a time; node (j, i)
    needs (j, i+1) on compression wave j and (j-1, i) on reflected wave i,
    both on diagonal d - 1.  Segment speeds are endpoint averages.
    """
    u = np.asarray(u_levels, dtype=float)
    M = u.size
    lower = np.tril(np.ones((M, M), dtype=bool))
    a = np.where(lower, 0.5 * (u[:, None] - u[None, :]), 0.0)
    c = np.asarray(relation(a), dtype=float)
    h = np.full((M, M), np.nan)
    t = np.full((M, M), np.nan)
    idx = np.arange(M)
    h[idx, idx] = H
    t[idx, idx] = t_surface
    for d in range(1, M):
        j = np.arange(d, M)
        i = j - d
        hA, tA, cA = h[j, i + 1], t[j, i + 1], c[j, i + 1]
        hB, tB, cB = h[j - 1, i], t[j - 1, i], c[j - 1, i]
        cn = c[j, i]
        c1 = 0.5 * (cA + cn)
        c2 = 0.5 * (cB + cn)
        tn = (hB - hA + c1 * tA + c2 * tB) / (c1 + c2)
        hn = hA + c1 * (tn - tA)
        live = (hA >= 0) & (hB >= 0) & (hn >= 0)
        tol = 1e-12 * (1.0 + np.abs(tn))
        bad = live & ((tn > tA + tol) | (tn < tB - tol))
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise TangledNet(
                f"H={H:g} um: node ({j[k]}, {i[k]}) at t={tn[k]:.5g} ns breaks the wave "
                f"ordering of its neighbours (t={tB[k]:.5g}, {tA[k]:.5g}); the arrival "
                "times are inconsistent with the current sound-speed table")
        h[j, i] = hn
        t[j, i] = tn

    launch = _launch_times(h, t, c)
    return Net(H=float(H), u_levels=u, h=h, t=t, a=a, c=c, launch=launch)


def _launch_times(h, t, c) -> np.ndarray:
    M = h.shape[0]
    launch = np.empty(M)
    neg = np.tril(h < 0)
    for j in range(M):
        below = np.flatnonzero(neg[j, : j + 1])
        if below.size == 0:
            # wave j leaves the reflected region at node (j, 0) and runs
            # through the undisturbed simple wave to the loading plane
            launch[j] = t[j, 0] - h[j, 0] / c[j, 0]
        else:
            k = int(below[-1])
            h1, t1 = h[j, k + 1], t[j, k + 1]
            h0, t0 = h[j, k], t[j, k]
            launch[j] = t1 - h1 * (t1 - t0) / (h1 - h0)
    return launch


def corrected_times(net: Net, c_levels: np.ndarray) -> np.ndarray:
    """Reflection-free arrival times launch + H / c_L(a_j)."""
    return net.launch + net.H / np.asarray(c_levels, dtype=float)


def fit_cl(thicknesses, times) -> np.ndarray:
    """Least-squares slope of thickness against time, one per column."""
    H = np.asarray(thicknesses, dtype=float)
    T = np.asarray(times, dtype=float)
    if T.ndim == 1:
        T = T[:, None]
    if H.size < 2 or np.ptp(H) <= 0:
        raise DegenerateFit("fitting a wave speed needs at least two distinct thicknesses")
    dH = H - H.mean()
    dT = T - T.mean(axis=0)
    sxx = np.sum(dT * dT, axis=0)
    sxy = np.sum(dT * dH[:, None], axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = sxy / sxx
    bad = ~(np.isfinite(c) & (c > 0))
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise DegenerateFit(
            f"level {k}: arrival times do not increase with thickness (slope {c[k]:.4g})")
    return c


# -- iteration ---------------------------------------------------------------

@dataclass
class IterResult:
    relation: SoundSpeedRelation
    a_levels: np.ndarray
    c_levels: np.ndarray
    fitted: np.ndarray
    n_iter: int
    residuals: list
    nets: list = field(default_factory=list)


class _Table:
    """Maps the fitted level speeds to a relation for one analysis mode."""

    def __init__(self, a_levels, cfg: AnalysisConfig, state: Optional[HugoniotState]):
        self.a = a_levels
        self.aware = cfg.mode == 3
        if not self.aware:
            self.fit = np.ones(a_levels.size, dtype=bool)
            self.rel_kw = {"mode": SHOCK_FREE}
            return
        from .shock import solve_release_params

        if state is None or not np.isfinite(state.rhoR):
            raise ConfigError("shock-aware iteration needs a Hugoniot state with rho_R")
        rp = solve_release_params(state, state.rhoR, cfg.beta_branch)
        aH = state.aH
        span = a_levels[-1] - aH
        if not span > 0:
            raise ConfigError(f"levels stop at a={a_levels[-1]:.4g}, below a_H={aH:.4g}")
        self.fit = a_levels > aH + cfg.ramp_margin * span
        n = int(self.fit.sum())
        if n < 2:
            raise ConfigError("fewer than two ramp levels above the Hugoniot state")
        self.n_ext = max(2, int(round(0.05 * n)))
        self.aH = aH
        self.rel_kw = {"mode": SHOCK_AWARE, "aH": aH, "cLR": rp.cLR, "beta": rp.beta}

    def relation(self, c_fit: np.ndarray) -> SoundSpeedRelation:
        a = self.a[self.fit]
        if not self.aware:
            return SoundSpeedRelation(a_tab=a, cL_tab=c_fit, **self.rel_kw)
        k = self.n_ext
        slope, icpt = np.polyfit(a[:k], c_fit[:k], 1)
        c_h = max(icpt + slope * self.aH, 1e-6 * c_fit[0])
        return SoundSpeedRelation(a_tab=np.concatenate([[self.aH], a]),
                                  cL_tab=np.concatenate([[c_h], c_fit]), **self.rel_kw)


def _map(executor, fn, *args):
    if executor is None:
        return [fn(*a) for a in zip(*args)]
    return list(executor.map(fn, *args))


def iterate(levels: LevelSet, cfg: AnalysisConfig, state: Optional[HugoniotState] = None,
            warm: Optional[SoundSpeedRelation] = None, executor=None,
            keep_nets: bool = False) -> IterResult:
    """Self-consistent c_L(a) from a level set.

    Modes 1 and 2 fit every level.  Mode 3 fits the ramp levels above a_H
    and uses the linear release segment below; the table value at a_H is
    extrapolated from the first ramp knots because the plateau level itself
    is smeared by the jump.
    """
    u = levels.u_levels
    a_levels = 0.5 * (u - u[0])
    if cfg.mode == 3 and state is not None and abs(u[0] - state.u_base) > 1e-9:
        raise ConfigError(
            f"shock-aware levels must start at U_H - a_H = {state.u_base:.6g}, got {u[0]:.6g}")
    tab = _Table(a_levels, cfg, state)
    H = levels.thicknesses
    raw = levels.t_arrival[:, tab.fit]
    c = warm.table(a_levels[tab.fit]) if warm is not None else fit_cl(H, raw)
    residuals: list = []
    best, best_at = np.inf, 0
    nets: list = []
    for it in range(1, cfg.max_iter + 1):
        rel = tab.relation(c)
        nets = _map(executor, build_net, [u] * H.size, list(levels.t_arrival), list(H),
                    [rel] * H.size)
        c_all = np.asarray(rel(a_levels), dtype=float)
        tstar = np.array([corrected_times(n, c_all) for n in nets])[:, tab.fit]
        c_new = fit_cl(H, tstar)
        res = float(np.max(np.abs(c_new - c) / c))
        residuals.append(res)
        c = c + cfg.relax * (c_new - c)
        if res < cfg.tol_cl:
            rel = tab.relation(c)
            return IterResult(relation=rel, a_levels=a_levels,
                              c_levels=np.asarray(rel(a_levels), dtype=float),
                              fitted=tab.fit, n_iter=it, residuals=residuals,
                              nets=nets if keep_nets else [])
        if res < best * (1 - 1e-3):
            best, best_at = res, it
        elif it - best_at >= cfg.stall_window:
            break
    rel = tab.relation(c)
    why = "stalled" if len(residuals) < cfg.max_iter else "hit max_iter"
    raise NotConverged(
        f"characteristics iteration {why} after {len(residuals)} iterations "
        f"(residual {residuals[-1]:.3g}, tolerance {cfg.tol_cl:g})",
        state={"relation": rel, "residuals": residuals})


def nets_for(levels: LevelSet, relation: SoundSpeedRelation,
             thicknesses: Optional[Sequence[float]] = None) -> list:
    """Nets of the given (default: all) thicknesses under a fixed relation."""
    out = []
    for H, row in zip(levels.thicknesses, levels.t_arrival):
        if thicknesses is None or any(abs(H - x) < 1e-9 for x in thicknesses):
            out.append(build_net(levels.u_levels, row, H, relation))
    return out
