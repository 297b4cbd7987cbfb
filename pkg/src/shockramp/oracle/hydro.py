"""1-D Lagrangian hydrocode: piston on the left, free surface on the right.

Staggered grid (velocities on nodes, thermodynamics in cells) with
quadratic plus linear artificial viscosity.  Time integration is a
two-stage predictor-corrector in the compatible form: the internal energy
update uses the same time-centred nodal velocities as the kinetic energy
update, so total energy balances the piston work to round-off.
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..core import HugoniotState, VelocityProfile
from ..errors import ConfigError, UnstableStep
from .eos import MaterialModel

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DriveProgram:
    """Piston velocity history as breakpoints (t, u).

    The first breakpoint sits at t = 0; its velocity is the initial jump
    applied to the material at rest.  Between breakpoints the velocity is
    linear, after the last one it is held.
    """

    times: tuple
    velocities: tuple

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        u = np.asarray(self.velocities, dtype=float)
        if t.size == 0 or t.shape != u.shape:
            raise ConfigError("drive needs matching, non-empty breakpoint lists")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ConfigError("drive breakpoints must start at t=0 and increase")
        if u[0] < 0 or np.any(np.diff(u) < 0):
            raise ConfigError("drive velocity must be non-negative and nondecreasing")
        object.__setattr__(self, "times", tuple(float(x) for x in t))
        object.__setattr__(self, "velocities", tuple(float(x) for x in u))

    @classmethod
    def ramp(cls, u_max: float, ramp_time: float) -> "DriveProgram":
        return cls((0.0, ramp_time), (0.0, u_max))

    @classmethod
    def shock_ramp(cls, u_jump: float, hold: float, u_max: float,
                   ramp_time: float) -> "DriveProgram":
        if hold <= 0:
            return cls((0.0, ramp_time), (u_jump, u_max))
        return cls((0.0, hold, hold + ramp_time), (u_jump, u_jump, u_max))

    @classmethod
    def from_dict(cls, d: dict) -> "DriveProgram":
        if "breakpoints" in d:
            bp = d["breakpoints"]
            return cls(tuple(p[0] for p in bp), tuple(p[1] for p in bp))
        return cls.shock_ramp(float(d.get("u_jump", 0.0)), float(d.get("hold", 0.0)),
                              float(d["u_max"]), float(d["ramp"]))

    @property
    def u_jump(self) -> float:
        return self.velocities[0]

    @property
    def u_max(self) -> float:
        return self.velocities[-1]

    @property
    def t_end(self) -> float:
        return self.times[-1]

    def __call__(self, t):
        return np.interp(t, self.times, self.velocities)

    def launch_time(self, u):
        """First time the piston reaches velocity ``u`` (inverse of the drive)."""
        t, v = np.asarray(self.times), np.asarray(self.velocities)
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        for k, x in np.ndenumerate(u):
            if x <= v[0]:
                out[k] = 0.0
                continue
            j = int(np.searchsorted(v, x, side="left"))
            j = min(max(j, 1), v.size - 1)
            out[k] = t[j - 1] + (x - v[j - 1]) / (v[j] - v[j - 1]) * (t[j] - t[j - 1])
        return out if out.ndim else float(out)


@dataclass
class FlowField:
    times: np.ndarray
    h: np.ndarray
    u: np.ndarray
    v: np.ndarray
    P: np.ndarray
    e: np.ndarray

    def density(self, rho0: float) -> np.ndarray:
        return rho0 / self.v


@dataclass
class HydroRun:
    thickness: float
    profile: VelocityProfile
    field: FlowField
    energy_drift: float
    piston_work: float
    n_steps: int
    dx: float
    notes: dict = field(default_factory=dict)


@dataclass
class HydroResult:
    runs: list
    truth: Optional[HugoniotState]

    @property
    def profiles(self) -> list:
        return [r.profile for r in self.runs]

    @property
    def max_energy_drift(self) -> float:
        return max(r.energy_drift for r in self.runs)


def _viscosity(du, V, c, q_quad, q_lin):
    comp = np.minimum(du, 0.0)
    return (q_quad * comp * comp - q_lin * c * comp) / V


def _quiet(fn):
    """Silence floating-point warnings; a blown-up step is reported as UnstableStep."""
    @functools.wraps(fn)
    def wrapper(*args, **kw):
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            return fn(*args, **kw)
    return wrapper


@_quiet
def simulate(mat: MaterialModel, drive: DriveProgram, thickness: float, n_cells: int,
             t_end: float, *, cfl: float = 0.4, q_quad: float = 2.0, q_lin: float = 0.1,
             dt_out: float = 0.002, snap_interval: float = 0.02,
             dt_fixed: Optional[float] = None, label: str = "") -> HydroRun:
    """Run one sample of ``thickness`` um out to ``t_end`` ns."""
    if n_cells < 2 or thickness <= 0 or t_end <= 0:
        raise ConfigError("need n_cells >= 2, thickness > 0 and t_end > 0")
    dx = thickness / n_cells
    m = mat.rho0 * dx
    m_node = np.full(n_cells + 1, m)
    m_node[0] = m_node[-1] = 0.5 * m
    h_cells = (np.arange(n_cells) + 0.5) * dx

    x = np.arange(n_cells + 1) * dx
    u = np.zeros(n_cells + 1)
    e = np.zeros(n_cells)
    V = np.full(n_cells, mat.V0)

    t = 0.0
    work = 0.0
    e_total0 = 0.0
    drift = 0.0
    fs_t, fs_u = [0.0], [0.0]
    snap_t, snap = [], []
    next_snap = 0.0
    steps = 0

    def take_snapshot(t, u, V, e):
        p = mat.pressure(V, e)
        snap_t.append(t)
        snap.append((0.5 * (u[1:] + u[:-1]), V / mat.V0, p, e.copy()))

    def nodal_force(sigma):
        f = np.empty(n_cells + 1)
        f[0] = -sigma[0]
        f[1:-1] = sigma[:-1] - sigma[1:]
        f[-1] = sigma[-1]
        return f

    take_snapshot(t, u, V, e)
    next_snap += snap_interval
    while t < t_end - 1e-12:
        p = mat.pressure(V, e)
        c = np.sqrt(np.maximum(mat.sound_speed2(V, e), 0.0))
        du = u[1:] - u[:-1]
        q = _viscosity(du, V, c, q_quad, q_lin)
        width = x[1:] - x[:-1]
        if dt_fixed is None:
            speed = c + 2.0 * q_quad * np.maximum(-du, 0.0) + q_lin * c
            dt = cfl * float(np.min(width / speed))
        else:
            dt = dt_fixed
        dt = min(dt, t_end - t)
        t_new = t + dt
        sigma = p + q

        # predictor: half-step thermodynamic state
        acc = nodal_force(sigma) / m_node
        u_star = u + dt * acc
        u_star[0] = drive(t_new) if t_new > 0 else 0.0
        ubar = 0.5 * (u + u_star)
        # volumes advance by the velocity jump so a body at rest stays at V0 exactly
        V_half = V + 0.5 * dt * (ubar[1:] - ubar[:-1]) / m
        e_half = e - sigma * (V_half - V)
        p_half = mat.pressure(V_half, e_half)
        c_half = np.sqrt(np.maximum(mat.sound_speed2(V_half, e_half), 0.0))
        q_half = _viscosity(ubar[1:] - ubar[:-1], V_half, c_half, q_quad, q_lin)
        sigma = p_half + q_half

        # corrector
        u_new = u + dt * nodal_force(sigma) / m_node
        u_new[0] = drive(t_new)
        ubar = 0.5 * (u + u_new)
        x_new = x + dt * ubar
        e_new = e - dt * sigma * (ubar[1:] - ubar[:-1]) / m
        V_new = V + dt * (ubar[1:] - ubar[:-1]) / m

        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(e_new))
                and np.all(V_new > 0) and np.all(np.isfinite(V_new))):
            last = _field(snap_t, snap, h_cells) if snap else None
            raise UnstableStep(f"hydro step {steps} at t={t:.5g} ns went unstable "
                               f"(dt={dt:.3g} ns)", last_good=last)

        work += dt * sigma[0] * ubar[0] + 0.5 * m_node[0] * (u_new[0] ** 2 - u[0] ** 2)
        x, u, e, V, t = x_new, u_new, e_new, V_new, t_new
        steps += 1
        fs_t.append(t)
        fs_u.append(u[-1])
        if t >= next_snap - 1e-12:
            take_snapshot(t, u, V, e)
            next_snap += snap_interval
        if steps % 64 == 0 or t >= t_end - 1e-12:
            e_tot = float(np.sum(m * e) + 0.5 * np.sum(m_node * u * u))
            drift = max(drift, abs(e_tot - e_total0 - work) / max(abs(work), 1e-300))

    if snap_t[-1] < t:
        take_snapshot(t, u, V, e)
    t_grid = np.arange(0.0, t_end + 0.5 * dt_out, dt_out)
    u_grid = np.interp(t_grid, np.asarray(fs_t), np.asarray(fs_u))
    profile = VelocityProfile(thickness, t_grid, np.maximum(u_grid, 0.0),
                              label or f"h{thickness:g}")
    log.debug("hydro h=%g um: %d steps, drift %.2e", thickness, steps, drift)
    return HydroRun(thickness=thickness, profile=profile, field=_field(snap_t, snap, h_cells),
                    energy_drift=drift if work > 0 else 0.0, piston_work=work,
                    n_steps=steps, dx=dx)


def _field(snap_t, snap, h_cells) -> FlowField:
    u, v, P, e = (np.array([s[k] for s in snap]) for k in range(4))
    return FlowField(times=np.asarray(snap_t), h=h_cells, u=u, v=v, P=P, e=e)


@dataclass(frozen=True)
class JumpState:
    Us: float
    UH: float
    PH: float
    rhoH: float

    def closure_residuals(self, rho0: float) -> tuple:
        """Relative misfit of the momentum and mass jump conditions."""
        dP = self.PH / (rho0 * self.Us * self.UH) - 1.0
        drho = self.rhoH / (rho0 * self.Us / (self.Us - self.UH)) - 1.0
        return dP, drho


def measure_jump(fld: FlowField, rho0: float, t_window: Sequence[float],
                 behind: tuple = (0.25, 0.75)) -> JumpState:
    """Shock state from snapshots while a single shock runs into rest.

    The front at each snapshot is where the stress crosses half of the
    post-shock plateau; the shock speed is the least-squares slope of front
    position against time.  Post-shock values are cell averages between the
    given fractions of the shocked layer, away from piston wall heating.
    """
    sel = np.flatnonzero((fld.times >= t_window[0]) & (fld.times <= t_window[1]))
    if sel.size < 3:
        raise ConfigError("need at least three snapshots inside the shock window")
    fronts, rhos, Ps, us = [], [], [], []
    for k in sel:
        P = fld.P[k]
        i = int(np.flatnonzero(P > 0.5 * P.max())[-1])
        lo, hi = int(behind[0] * i), max(int(behind[1] * i), int(behind[0] * i) + 1)
        plateau = float(np.median(P[lo:hi]))
        i = int(np.flatnonzero(P > 0.5 * plateau)[-1])
        if i + 1 < P.size:
            f = (P[i] - 0.5 * plateau) / (P[i] - P[i + 1])
            fronts.append(fld.h[i] + f * (fld.h[i + 1] - fld.h[i]))
        else:
            fronts.append(fld.h[i])
        rhos.append(np.mean(rho0 / fld.v[k, lo:hi]))
        Ps.append(np.mean(P[lo:hi]))
        us.append(np.mean(fld.u[k, lo:hi]))
    Us = float(np.polyfit(fld.times[sel], fronts, 1)[0])
    return JumpState(Us=Us, UH=float(np.mean(us)), PH=float(np.mean(Ps)),
                     rhoH=float(np.mean(rhos)))


def run_hydro(mat: MaterialModel, drive: DriveProgram, cells: int, length: float,
              thicknesses: Sequence[float], t_end, *, truth_window=None,
              executor=None, **kw) -> HydroResult:
    """One run per thickness on a common mesh spacing ``length / cells``.

    ``t_end`` is a number or a callable of thickness.  When ``drive`` starts
    with a jump, the true Hugoniot state follows from the material model and
    the piston velocity; the simulated jump is checked separately by
    :func:`measure_jump`.
    """
    dx = length / cells
    jobs = []
    for h in thicknesses:
        n = max(2, int(round(h / dx)))
        te = t_end(h) if callable(t_end) else t_end
        jobs.append((h, n, te))
    if executor is None:
        runs = [simulate(mat, drive, h, n, te, **kw) for h, n, te in jobs]
    else:
        futures = [executor.submit(simulate, mat, drive, h, n, te, **kw) for h, n, te in jobs]
        runs = [f.result() for f in futures]
    truth = mat.hugoniot_state(drive.u_jump) if drive.u_jump > 0 else None
    return HydroResult(runs=runs, truth=truth)
