"""Loading, breakout detection and velocity-level extraction."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import AnalysisConfig, VelocityProfile, validate_profile
from .errors import (
    IngestError,
    MissingThickness,
    NoJumpDetected,
    NonOverlappingRange,
    ParseError,
    TwoWaveStructure,
)

PROFILE_COLUMNS = ("t_ns", "u_km_s")

# a jump is a rise of more than JUMP_FRACTION of the profile span within
# JUMP_WINDOW of the record duration
JUMP_FRACTION = 0.10
JUMP_WINDOW = 0.01
PLATEAU_BAND = 0.0025


@dataclass(frozen=True)
class BreakoutInfo:
    t_bo: float
    u_bo: float
    rise_start: float
    rise_end: float = float("nan")


@dataclass(frozen=True)
class LevelSet:
    u_levels: np.ndarray
    t_arrival: np.ndarray
    thicknesses: np.ndarray

    @property
    def M(self) -> int:
        return self.u_levels.size

    def row(self, k: int) -> np.ndarray:
        return self.t_arrival[k]


# -- reading -----------------------------------------------------------------

def read_profile_csv(path, thickness: Optional[float], label: Optional[str] = None,
                     columns: Sequence[str] = PROFILE_COLUMNS) -> VelocityProfile:
    """Read one two-column profile CSV; lines starting with '#' are comments."""
    if thickness is None:
        raise MissingThickness(f"{path}: no thickness given for this profile")
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"{path}: no such profile file")
    t, u = [], []
    header = None
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in row]
                missing = [c for c in columns if c not in header]
                if missing:
                    raise ParseError(f"{path}: header lacks column(s) {missing}", lineno)
                it, iu = header.index(columns[0]), header.index(columns[1])
                continue
            try:
                t.append(float(row[it]))
                u.append(float(row[iu]))
            except (ValueError, IndexError):
                raise ParseError(f"{path}: non-numeric or missing cell {row!r}", lineno)
    if header is None:
        raise ParseError(f"{path}: empty file", 1)
    return validate_profile(VelocityProfile(float(thickness), t, u, label or path.stem))


def load_profiles(entries: Iterable[dict], base_dir=None,
                  columns: Sequence[str] = PROFILE_COLUMNS) -> list:
    """Load the profiles listed in a run configuration.

    Each entry is a mapping with ``path``, ``thickness`` (um) and an
    optional ``label``; relative paths resolve against ``base_dir``.
    """
    out = []
    for entry in entries:
        path = Path(entry["path"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        out.append(read_profile_csv(path, entry.get("thickness"), entry.get("label"), columns))
    return out


# -- conditioning ------------------------------------------------------------

def moving_average(u: np.ndarray, width: int) -> np.ndarray:
    """Centred moving average; ``width`` <= 1 returns the input."""
    if width <= 1:
        return np.asarray(u, dtype=float)
    k = np.ones(width) / width
    pad = width // 2
    up = np.pad(u, (pad, width - 1 - pad), mode="edge")
    return np.convolve(up, k, mode="valid")


def running_max(u) -> np.ndarray:
    return np.maximum.accumulate(np.asarray(u, dtype=float))


def lower_envelope(u) -> np.ndarray:
    """Monotone envelope that follows the last upward crossing of each level.

    The record is cut at its first global maximum and replaced by the
    running minimum taken backwards in time.  Overshoot and ringing behind a
    jump then no longer claim the arrival of the levels they poke into.
    """
    u = np.asarray(u, dtype=float)
    k = int(np.argmax(u))
    env = np.empty_like(u)
    env[: k + 1] = np.minimum.accumulate(u[: k + 1][::-1])[::-1]
    env[k + 1:] = u[k]
    return env


def envelope(u, kind: str = "last") -> np.ndarray:
    if kind == "max":
        return running_max(u)
    if kind == "last":
        return lower_envelope(u)
    raise ValueError(f"unknown envelope kind {kind!r}")


def arrival_times(t: np.ndarray, env: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Inverse interpolation of a nondecreasing envelope.

    A level sitting on a flat stretch of the envelope arrives at the end of
    that stretch, i.e. when the envelope starts to exceed it.
    """
    out = np.empty(levels.size)
    for n, L in enumerate(levels):
        above = np.flatnonzero(env > L)
        if above.size == 0:
            hit = np.flatnonzero(env >= L)
            if hit.size == 0:
                raise NonOverlappingRange(f"level {L:.6g} km/s never reached")
            k = int(hit[0])
        else:
            k = int(above[0])
        if k == 0:
            out[n] = t[0]
            continue
        u0, u1 = env[k - 1], env[k]
        out[n] = t[k - 1] + (L - u0) / (u1 - u0) * (t[k] - t[k - 1]) if u1 > u0 else t[k]
    return out


# -- breakout ------------------------------------------------------------------

def noise_floor(u: np.ndarray) -> float:
    """Robust white-noise estimate from second differences."""
    if u.size < 3:
        return 0.0
    d2 = np.diff(u, 2)
    return float(1.4826 * np.median(np.abs(d2 - np.median(d2))) / np.sqrt(6.0))


def _steep_segments(p: VelocityProfile):
    t, u = p.t, p.u
    span = float(u.max() - u.min())
    tau = max(JUMP_WINDOW * (t[-1] - t[0]), 2.0 * float(np.median(np.diff(t))))
    gain = np.interp(t + tau, t, u) - u
    steep = gain > JUMP_FRACTION * span
    segs = []
    idx = np.flatnonzero(steep)
    if idx.size:
        start = prev = idx[0]
        for k in idx[1:]:
            if t[k] - t[prev] > tau:
                segs.append((start, prev))
                start = k
            prev = k
        segs.append((start, prev))
    return segs, tau, span


def detect_breakout(p: VelocityProfile, cfg: Optional[AnalysisConfig] = None) -> BreakoutInfo:
    """Locate the shock-breakout jump in a free-surface record.

    Raises :class:`NoJumpDetected` for a ramp without a jump and
    :class:`TwoWaveStructure` when two separate jumps are present (elastic
    precursor ahead of the plastic shock).
    """
    frac = 0.5 if cfg is None else cfg.breakout_frac
    t, u = p.t, p.u
    span = float(u.max() - u.min())
    sigma = noise_floor(u)
    if not span > 10.0 * sigma or span <= 0:
        raise NoJumpDetected(f"{p.label!r}: velocity span {span:.3g} is within noise")
    segs, tau, span = _steep_segments(p)
    if not segs:
        raise NoJumpDetected(f"{p.label!r}: no jump found (pure ramp profile)")
    if len(segs) > 1:
        times = ", ".join(f"{t[s]:.4g}" for s, _ in segs)
        raise TwoWaveStructure(
            f"{p.label!r}: {len(segs)} separate jumps near t = {times} ns; the profile shows "
            "an elastic-plastic two-wave structure, which the single-shock treatment "
            "cannot represent")
    ks, ke = segs[0]
    base = float(np.median(u[: max(ks, 1)]))
    thr = base + max(10.0 * sigma, 1e-3 * span)
    before = np.flatnonzero(u[: ks + 1] <= thr)
    i0 = int(before[-1]) if before.size else 0
    rise_start = float(t[i0])

    t_top = t[ke] + tau
    top = (t >= t[ks]) & (t <= t_top + tau)
    peak = float(u[top].max())
    k_end = int(np.flatnonzero(top & (u >= base + 0.98 * (peak - base)))[0])
    rise_end = float(t[k_end])

    u_bo = _plateau(t, u, k_end, 10.0 * tau, PLATEAU_BAND * span)
    level = base + frac * (u_bo - base)
    k = k_end
    while k > i0 and u[k - 1] >= level:
        k -= 1
    if k == 0:
        t_bo = float(t[0])
    else:
        u0, u1 = u[k - 1], u[k]
        t_bo = float(t[k - 1] + (level - u0) / (u1 - u0) * (t[k] - t[k - 1]))
    return BreakoutInfo(t_bo=t_bo, u_bo=u_bo, rise_start=min(rise_start, t_bo),
                        rise_end=rise_end)


def _plateau(t, u, k0, width, band) -> float:
    """Median of the samples in the dominant dwell band after the rise.

    Within ``width`` after sample ``k0`` the velocity value around which the
    record dwells longest is taken as the plateau.  Ringing behind the jump
    and the foot of the following ramp pass through quickly and lose.
    """
    sel = np.flatnonzero((t >= t[k0]) & (t <= t[k0] + width))
    if sel.size < 3:
        return float(np.median(u[k0:k0 + 3]))
    uw = u[sel]
    w = np.gradient(t[sel])
    order = np.argsort(uw, kind="stable")
    us, ws = uw[order], np.concatenate([[0.0], np.cumsum(w[order])])
    lo = np.searchsorted(us, us - band, side="left")
    hi = np.searchsorted(us, us + band, side="right")
    dwell = ws[hi] - ws[lo]
    best = int(np.argmax(dwell))
    return float(np.median(us[lo[best]:hi[best]]))


# -- levels ------------------------------------------------------------------

def extract_levels(profiles: Sequence[VelocityProfile], M: int, u_floor: float = 0.0,
                   envelope_kind: str = "last", smooth_width: int = 0,
                   u_ceil: Optional[float] = None) -> LevelSet:
    """Uniform velocity levels on [u_floor, u_ceil] and their arrival times."""
    if M < 2:
        raise IngestError("need at least two velocity levels")
    envs = [envelope(moving_average(p.u, smooth_width), envelope_kind) for p in profiles]
    top = min(float(e[-1]) for e in envs)
    if u_ceil is None:
        u_ceil = top
    elif u_ceil > top + 1e-12:
        raise NonOverlappingRange(f"u_ceil {u_ceil} above the lowest profile maximum {top}")
    if not u_ceil > u_floor:
        raise NonOverlappingRange(
            f"profiles do not share a velocity span above the floor {u_floor:.4g} km/s "
            f"(common maximum {top:.4g} km/s)")
    levels = np.linspace(u_floor, u_ceil, M)
    rows = []
    for p, env in zip(profiles, envs):
        if env[0] > u_floor + 1e-9 * max(1.0, abs(u_floor)):
            raise NonOverlappingRange(
                f"{p.label!r} starts at {env[0]:.4g} km/s, above the level floor")
        rows.append(arrival_times(p.t, env, levels))
    t_arr = np.array(rows)
    if np.any(np.diff(t_arr, axis=1) <= 0):
        j = np.argwhere(np.diff(t_arr, axis=1) <= 0)[0]
        raise IngestError(f"arrival times of {profiles[j[0]].label!r} not strictly "
                          f"increasing at level {j[1]}; raise n_levels resolution or smooth")
    return LevelSet(u_levels=levels, t_arrival=t_arr,
                    thicknesses=np.array([p.thickness for p in profiles]))
