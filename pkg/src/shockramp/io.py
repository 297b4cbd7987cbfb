"""Deterministic file output and small readers."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .core import LoadingPath, SoundSpeedRelation, VelocityProfile
from .errors import IngestError, ParseError

PATH_COLUMNS = ("a_km_s", "cL_km_s", "up_km_s", "P_GPa", "rho_g_cm3")


def config_digest(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def meta(digest: str) -> dict:
    return {"tool": "shockramp", "version": __version__, "config_sha256": digest}


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence[float]], digest: str) -> Path:
    path = Path(path)
    lines = [f"# shockramp {__version__} config_sha256={digest}", ",".join(columns)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path, payload: dict, digest: str) -> Path:
    path = Path(path)
    body = dict(payload)
    body["meta"] = meta(digest)
    path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n")
    return path


def write_dat(path, header: str, columns: Sequence[np.ndarray], digest: str) -> Path:
    """Whitespace-separated columns with '#' header lines, for gnuplot."""
    path = Path(path)
    cols = [np.asarray(c, dtype=float) for c in columns]
    lines = [f"# shockramp {__version__} config_sha256={digest}", f"# {header}"]
    lines.extend(" ".join(_fmt(v) for v in row) for row in zip(*cols))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_profile(path, p: VelocityProfile, digest: str) -> Path:
    return write_csv(path, ("t_ns", "u_km_s"), zip(p.t, p.u), digest)


def write_relation(path, rel: SoundSpeedRelation, digest: str) -> Path:
    return write_csv(path, ("a_km_s", "cL_km_s"), zip(rel.a_tab, rel.cL_tab), digest)


def write_path(path, lp: LoadingPath, digest: str) -> Path:
    return write_csv(path, PATH_COLUMNS, zip(lp.a, lp.cL, lp.up, lp.P, lp.rho), digest)


def read_path(path) -> LoadingPath:
    """Read a loading-path CSV as written by :func:`write_path`."""
    path = Path(path)
    if not path.exists():
        raise IngestError(f"{path}: no such file")
    header, rows = None, []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
            missing = [c for c in ("P_GPa", "rho_g_cm3") if c not in header]
            if missing:
                raise ParseError(f"{path}: header lacks column(s) {missing}", lineno)
            continue
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"{path}: non-numeric cell in {line!r}", lineno)
    if header is None or len(rows) < 2:
        raise IngestError(f"{path}: need a header and at least two rows")
    data = np.array(rows)
    col = {name: data[:, k] for k, name in enumerate(header)}
    n = data.shape[0]
    nan = np.full(n, np.nan)
    return LoadingPath(a=col.get("a_km_s", nan), cL=col.get("cL_km_s", nan),
                       up=col.get("up_km_s", nan), P=col["P_GPa"], rho=col["rho_g_cm3"])
