"""Ground-truth loading path read off a simulated flow field."""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..core import LoadingPath
from ..errors import StationInReleaseZone
from .hydro import FlowField


def extract_truth(fld: FlowField, rho0: float, station: float,
                  rho_window: Optional[tuple] = None, n: int = 256) -> LoadingPath:
    """P(rho) history of the cell nearest ``station`` (um).

    Only the monotone recompression branch is kept: samples that raise the
    running maximum of the density.  The branch is resampled on ``n``
    uniform densities inside ``rho_window``.  ``a`` and ``cL`` of the
    returned path are not known from the field and are left as NaN; ``up``
    is the cell velocity.
    """
    k = int(np.argmin(np.abs(fld.h - station)))
    rho = rho0 / fld.v[:, k]
    P, u = fld.P[:, k], fld.u[:, k]
    lo, hi = (-np.inf, np.inf) if rho_window is None else rho_window
    inside = (rho >= lo) & (rho <= hi)
    if rho_window is None and np.ptp(rho) < 1e-12 * rho0:
        nan = np.array([np.nan])
        return LoadingPath(a=nan, cL=nan, up=np.array([u[0]]), P=np.array([P[0]]),
                           rho=np.array([rho[0]]))
    rising = np.concatenate([[True], rho[1:] > np.maximum.accumulate(rho)[:-1]])
    keep = inside & rising
    falling = inside & ~rising
    if keep.sum() < 2 or falling.sum() > keep.sum():
        raise StationInReleaseZone(
            f"station h={fld.h[k]:.4g} um: {int(falling.sum())} of {int(inside.sum())} samples "
            "in the density window lie off the monotone recompression branch")
    r, p, uu = rho[keep], P[keep], u[keep]
    grid = np.linspace(max(lo, r[0]), min(hi, r[-1]), n)
    nan = np.full(n, np.nan)
    return LoadingPath(a=nan, cL=nan, up=np.interp(grid, r, uu), P=np.interp(grid, r, p),
                       rho=grid)
