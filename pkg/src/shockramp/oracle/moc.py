"""Forward method of characteristics for shock-free ramps.

The drive is split into K velocity levels u_k, each launched from the
piston at the time the piston reaches it.  In the undisturbed simple wave
the state of wave k is a_k = u_k, so its free-surface level is U_k = 2 u_k.
Compression wave k crosses the reflections of the earlier waves m < k at
nodes (k, m) whose state is again a = (U_k - U_m) / 2.  Nodes are marched
forward along anti-diagonals s = k + m.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..core import VelocityProfile
from ..errors import ConfigError, DriveReflection, ShockFormation
from .hydro import DriveProgram


def forward_characteristics(relation: Callable, drive: DriveProgram, thickness: float,
                            n_waves: int = 1000, t_end: float | None = None,
                            n_base: int = 32, label: str = "") -> VelocityProfile:
    """Free-surface velocity of a sample of ``thickness`` um.

    ``relation`` maps a (km/s) to c_L (km/s) and must cover [0, u_max].
    The profile is zero until the foot arrives, then samples each surface
    arrival of the K waves, then holds the final level until ``t_end``.
    """
    if drive.u_jump != 0.0:
        raise ConfigError("forward characteristics need a shock-free drive (u_jump = 0)")
    if n_waves < 2:
        raise ConfigError("need at least two waves")
    H = float(thickness)
    K = n_waves
    u = np.linspace(0.0, drive.u_max, K)
    U = 2.0 * u
    tau = np.asarray(drive.launch_time(u), dtype=float)

    lower = np.tril(np.ones((K, K), dtype=bool))
    a = np.where(lower, 0.5 * (U[:, None] - U[None, :]), 0.0)
    c = np.asarray(relation(a), dtype=float)
    c_in = np.asarray(relation(u), dtype=float)
    h = np.full((K, K), np.nan)
    t = np.full((K, K), np.nan)

    for s in range(0, 2 * K - 1):
        n = np.arange(max(0, (s + 1) // 2), min(K - 1, s) + 1)
        m = s - n
        inner = m < n
        # interior nodes (n, m), m < n
        ni, mi = n[inner], m[inner]
        if ni.size:
            first = mi == 0
            hA = np.where(first, 0.0, h[ni, np.maximum(mi - 1, 0)])
            tA = np.where(first, tau[ni], t[ni, np.maximum(mi - 1, 0)])
            cA = np.where(first, c_in[ni], c[ni, np.maximum(mi - 1, 0)])
            hB, tB, cB = h[ni - 1, mi], t[ni - 1, mi], c[ni - 1, mi]
            cn = c[ni, mi]
            c1 = 0.5 * (cA + cn)
            c2 = 0.5 * (cB + cn)
            tn = (hB - hA + c1 * tA + c2 * tB) / (c1 + c2)
            hn = hA + c1 * (tn - tA)
            if np.any((tn <= tB) | (tn < tA) | (hn > H)):
                k = int(np.flatnonzero((tn <= tB) | (tn < tA) | (hn > H))[0])
                raise ShockFormation(
                    f"wave {ni[k]} crosses wave {ni[k] - 1} at h={hn[k]:.4g} um, "
                    f"t={tn[k]:.4g} ns before reaching the surface; the drive is too steep "
                    "for an isentropic solution")
            if np.any(hn < 0):
                k = int(np.flatnonzero(hn < 0)[0])
                raise DriveReflection(
                    f"reflection of wave {mi[k]} reaches the piston before wave {ni[k]} "
                    "is launched; the drive lasts too long for this thickness")
            h[ni, mi] = hn
            t[ni, mi] = tn
        # surface nodes (n, n)
        ns = n[~inner]
        if ns.size:
            k = ns[0]
            if k == 0:
                h0, t0, c0 = 0.0, tau[0], c_in[0]
            else:
                h0, t0, c0 = h[k, k - 1], t[k, k - 1], c[k, k - 1]
            c1 = 0.5 * (c0 + c[k, k])
            h[k, k] = H
            t[k, k] = t0 + (H - h0) / c1

    ts = np.diag(t).copy()
    if np.any(np.diff(ts) <= 0):
        k = int(np.flatnonzero(np.diff(ts) <= 0)[0])
        raise ShockFormation(f"surface arrivals of waves {k} and {k + 1} coincide or invert")
    span = ts[-1] - ts[0]
    t_end = ts[-1] + 0.25 * span if t_end is None else max(t_end, ts[-1] + 1e-3 * span)
    t_pre = np.linspace(0.0, ts[0], n_base, endpoint=False)
    t_post = np.linspace(ts[-1], t_end, n_base + 1)[1:]
    tt = np.concatenate([t_pre, ts, t_post])
    uu = np.concatenate([np.zeros(n_base), U, np.full(n_base, U[-1])])
    return VelocityProfile(H, tt, uu, label or f"h{H:g}")
