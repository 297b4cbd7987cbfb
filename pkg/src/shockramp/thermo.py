"""Quadrature of c_L(a) into a loading path, and path comparison.

Along a Lagrangian simple wave dP = rho0 c_L da and d(1/rho) = -da / (rho0 c_L),
so a sound-speed relation integrates to P(rho) from any known state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .core import HugoniotState, LoadingPath, SoundSpeedRelation
from .errors import AnchorOutsideRelation, RangeNotCovered

REFINE = 4
N_COMPARE = 512


def _grid(relation: SoundSpeedRelation, a0: float, a1: float, refine: int) -> np.ndarray:
    """Table knots inside [a0, a1] with ``refine`` sub-intervals per knot gap."""
    knots = relation.a_tab[(relation.a_tab > a0) & (relation.a_tab < a1)]
    if relation.shock_aware and a0 < relation.aH < a1:
        knots = np.union1d(knots, [relation.aH])
    nodes = np.concatenate([[a0], knots, [a1]])
    if nodes.size < 3:
        # a single gap (e.g. an analytic segment): sample it uniformly
        return np.linspace(a0, a1, 64 * refine + 1)
    steps = np.linspace(0.0, 1.0, refine + 1)[:-1]
    fine = (nodes[:-1, None] + np.diff(nodes)[:, None] * steps[None, :]).ravel()
    return np.concatenate([fine, [a1]])


def integrate_from_ambient(relation: SoundSpeedRelation, rho0: float,
                           a_max: Optional[float] = None, refine: int = REFINE,
                           grid: Optional[np.ndarray] = None) -> LoadingPath:
    """Loading path from rest (P = 0, rho = rho0, u_p = a) up to ``a_max``."""
    a_max = relation.a_max if a_max is None else a_max
    a = _grid(relation, 0.0, a_max, refine) if grid is None else np.asarray(grid, float)
    c = np.asarray(relation(a), dtype=float)
    P = rho0 * cumulative_trapezoid(c, a, initial=0.0)
    V = 1.0 / rho0 - cumulative_trapezoid(1.0 / c, a, initial=0.0) / rho0
    return LoadingPath(a=a, cL=c, up=a.copy(), P=P, rho=1.0 / V)


def integrate_from_hugoniot(relation: SoundSpeedRelation, state: HugoniotState,
                            anchor: Optional[float] = None, a_min: Optional[float] = None,
                            a_max: Optional[float] = None,
                            refine: int = REFINE) -> LoadingPath:
    """Path through the Hugoniot state (P_H, rho_H) placed at ``anchor``.

    ``anchor`` defaults to a_H.  The path runs from ``a_min`` (default: the
    anchor) up to ``a_max``; the particle velocity is u_p = a - anchor + U_H.
    """
    anchor = state.aH if anchor is None else float(anchor)
    a_max = relation.a_max if a_max is None else a_max
    a_min = anchor if a_min is None else a_min
    if not (0.0 <= a_min <= anchor < a_max):
        raise AnchorOutsideRelation(
            f"anchor a={anchor:.5g} km/s must lie in [a_min={a_min:.5g}, a_max={a_max:.5g})")
    up_part = _grid(relation, anchor, a_max, refine)
    parts = [up_part]
    if a_min < anchor:
        parts.insert(0, _grid(relation, a_min, anchor, refine)[:-1])
    a = np.concatenate(parts)
    c = np.asarray(relation(a), dtype=float)
    k = int(np.searchsorted(a, anchor))
    Pi = state.rho0 * cumulative_trapezoid(c, a, initial=0.0)
    Vi = cumulative_trapezoid(1.0 / c, a, initial=0.0) / state.rho0
    P = state.PH + Pi - Pi[k]
    V = 1.0 / state.rhoH - (Vi - Vi[k])
    rho = 1.0 / V
    rho[k] = state.rhoH
    return LoadingPath(a=a, cL=c, up=a - anchor + state.UH, P=P, rho=rho)


def trim_path(path: LoadingPath, rho_max: float) -> LoadingPath:
    keep = path.rho <= rho_max * (1 + 1e-12)
    return LoadingPath(*(getattr(path, f)[keep] for f in ("a", "cL", "up", "P", "rho")))


@dataclass(frozen=True)
class ErrorReport:
    err: float
    max_rel: float
    rho_lo: float
    rho_hi: float
    n: int

    def to_dict(self) -> dict:
        return {"err": self.err, "max_rel": self.max_rel, "rho_lo": self.rho_lo,
                "rho_hi": self.rho_hi, "n": self.n}


def pressure_error(path: LoadingPath, ref: LoadingPath, rho_max: Optional[float] = None,
                   rho_min: Optional[float] = None, n: int = N_COMPARE) -> ErrorReport:
    """Mean absolute pressure misfit relative to the mean pressure.

    Both curves are resampled on ``n`` uniform densities over their common
    range (capped at ``rho_max``); err = <|P - P_ref|> / <(P + P_ref) / 2>
    with trapezoidal averages.
    """
    lo = max(float(path.rho.min()), float(ref.rho.min()))
    hi = min(float(path.rho.max()), float(ref.rho.max()))
    if rho_min is not None:
        lo = max(lo, rho_min)
    if rho_max is not None:
        hi = min(hi, rho_max)
    if not hi > lo:
        raise RangeNotCovered(
            f"path density range [{path.rho.min():.5g}, {path.rho.max():.5g}] does not overlap "
            f"the reference [{ref.rho.min():.5g}, {ref.rho.max():.5g}]")
    rho = np.linspace(lo, hi, n)
    P = _resample(path, rho)
    Pr = _resample(ref, rho)
    num = np.trapezoid(np.abs(P - Pr), rho)
    den = np.trapezoid(0.5 * (P + Pr), rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(P - Pr) / np.abs(Pr)
    rel = rel[np.isfinite(rel) & (np.abs(Pr) > 1e-12 * np.abs(Pr).max())]
    return ErrorReport(err=float(num / den), max_rel=float(rel.max()) if rel.size else 0.0,
                       rho_lo=lo, rho_hi=hi, n=n)


def _resample(path: LoadingPath, rho: np.ndarray) -> np.ndarray:
    order = np.argsort(path.rho, kind="stable")
    r, P = path.rho[order], path.P[order]
    keep = np.concatenate([[True], np.diff(r) > 0])
    return np.interp(rho, r[keep], P[keep])
