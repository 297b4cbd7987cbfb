"""Command-line front end: analyze, synth, validate, net."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import jsonschema

from . import __version__
from .cases import SynthCase, SynthResult, analysis_config, synthesize
from .chars import nets_for
from .errors import ConfigError, NotConverged, ShockRampError
from .ingest import load_profiles
from .io import config_digest, read_path, write_dat, write_json, write_path, write_profile, write_relation
from .pipeline import AnalysisResult, analyze
from .shock import HugoniotModel, state_from_jump

log = logging.getLogger("shockramp")

# -- schemas -----------------------------------------------------------------

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

ANALYSIS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "mode": {"enum": [1, 2, 3]},
        "n_levels": {"type": "integer", "minimum": 8},
        "tol_cl": _POS, "max_iter": {"type": "integer", "minimum": 1}, "relax": _POS,
        "tol_rhoR": _POS, "breakout_frac": _POS,
        "rho_max": {"type": ["number", "null"]},
        "u_floor": _NUM, "rhoR": {"type": ["number", "null"]},
        "rhoR_bracket": {"type": ["array", "null"], "items": _POS, "minItems": 2, "maxItems": 2},
        "max_rhoR_trials": {"type": "integer", "minimum": 2},
        "stretch": {"enum": ["caption", "full"]},
        "beta_branch": {"enum": ["positive", "negative"]},
        "smooth_width": {"type": "integer", "minimum": 0},
        "ramp_margin": _NUM, "stall_window": {"type": "integer", "minimum": 1},
        "envelope": {"enum": ["last", "max"]},
    },
}

HUGONIOT_MODEL_SCHEMA = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind", "c0", "s"],
         "properties": {"kind": {"const": "linear"}, "c0": _POS, "s": _POS}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "up", "us"],
         "properties": {"kind": {"const": "table"},
                        "up": {"type": "array", "items": _NUM, "minItems": 2},
                        "us": {"type": "array", "items": _NUM, "minItems": 2}}},
    ]
}

RUN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["rho0", "profiles"],
    "properties": {
        "mode": {"enum": [1, 2, 3]},
        "rho0": _POS,
        "profiles": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "additionalProperties": False,
                      "required": ["path"],
                      "properties": {"path": {"type": "string"}, "thickness": _POS,
                                     "label": {"type": "string"}}},
        },
        "columns": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        "hugoniot": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "model": HUGONIOT_MODEL_SCHEMA,
                "state": {"type": "object", "additionalProperties": False,
                          "required": ["Us", "UH", "aH"],
                          "properties": {"Us": _POS, "UH": _POS, "aH": _POS}},
            },
        },
        "analysis": ANALYSIS_SCHEMA,
        "reference": {"type": "string"},
        "compare_rho_min": _POS,
        "out": {"type": "string"},
        # provenance block written by synth; ignored on input
        "meta": {"type": "object"},
        "emit": {
            "type": "object", "additionalProperties": False,
            "properties": {"path": {"type": "boolean"}, "relation": {"type": "boolean"},
                           "report": {"type": "boolean"},
                           "net": {"type": "array", "items": _POS}},
        },
    },
}

CASE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["material", "drive", "thicknesses"],
    "properties": {
        "name": {"type": "string"},
        "material": {
            "type": "object", "additionalProperties": False,
            "required": ["kind", "rho0", "K0", "n"],
            "properties": {"kind": {"enum": ["murnaghan", "mie-gruneisen"]}, "rho0": _POS,
                           "K0": _POS, "n": _NUM, "Gamma0": _NUM, "cv": _NUM},
        },
        "drive": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["u_max", "ramp"],
                 "properties": {"u_jump": _NUM, "hold": _NUM, "u_max": _NUM, "ramp": _POS}},
                {"type": "object", "additionalProperties": False, "required": ["breakpoints"],
                 "properties": {"breakpoints": {
                     "type": "array", "minItems": 1,
                     "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}}}},
            ]
        },
        "thicknesses": {"type": "array", "items": _POS, "minItems": 1},
        "generator": {"enum": ["hydro", "characteristics"]},
        "mesh": {
            "type": "object", "additionalProperties": False,
            "properties": {"cells": {"type": "integer", "minimum": 2}, "length": _POS,
                           "cfl": _POS, "q_quad": _NUM, "q_lin": _NUM, "dt_out": _POS,
                           "dt": _POS},
        },
        "tail": _NUM,
        "record_speed": _POS,
        "n_waves": {"type": "integer", "minimum": 2},
        "relation": {"type": "object", "additionalProperties": False,
                     "required": ["kind", "c0", "beta"],
                     "properties": {"kind": {"const": "linear"}, "c0": _POS, "beta": _NUM}},
        "noise_sigma": {"type": "number", "minimum": 0},
        "analysis": ANALYSIS_SCHEMA,
    },
}


def load_config(path, schema: dict) -> dict:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {where}: {exc.message}")
    return cfg


# -- analysis ----------------------------------------------------------------

def _run_inputs(cfg: dict, base: Path) -> dict:
    analysis = dict(cfg.get("analysis", {}))
    if "mode" in cfg:
        analysis["mode"] = cfg["mode"]
    acfg = analysis_config(analysis)
    hug = cfg.get("hugoniot", {})
    model = HugoniotModel.from_dict(hug["model"]) if "model" in hug else None
    state = None
    if "state" in hug:
        s = hug["state"]
        state = state_from_jump(cfg["rho0"], s["Us"], s["UH"], s["aH"])
    columns = tuple(cfg["columns"]) if "columns" in cfg else None
    profiles = load_profiles(cfg["profiles"], base_dir=base, **({"columns": columns} if columns else {}))
    reference = read_path(base / cfg["reference"]) if "reference" in cfg else None
    return dict(profiles=profiles, cfg=acfg, rho0=float(cfg["rho0"]), hugoniot=model,
                state=state, reference=reference, rho_min_compare=cfg.get("compare_rho_min"))


def _write_result(out: Path, res: AnalysisResult, digest: str, emit: dict) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    report = res.summary()
    report["converged"] = True
    if emit.get("relation", True):
        write_relation(out / "relation.csv", res.relation, digest)
    if emit.get("path", True):
        write_path(out / "path.csv", res.path, digest)
    for h in emit.get("net", []):
        write_net(out, res, h, digest)
    if emit.get("report", True):
        write_json(out / "report.json", report, digest)
    return report


def write_net(out: Path, res: AnalysisResult, h: float, digest: str) -> Path:
    nets = nets_for(res.levels, res.relation, [h])
    if not nets:
        known = ", ".join(f"{x:g}" for x in res.levels.thicknesses)
        raise ConfigError(f"no profile with thickness {h:g} um (have {known})")
    return write_json(out / f"net_{h:g}.json", nets[0].to_dict(), digest)


def _write_failure(out: Path, exc: NotConverged, mode: int, digest: str) -> None:
    """Partial output of a run that did not converge."""
    out.mkdir(parents=True, exist_ok=True)
    state = exc.state or {}
    report = {"mode": mode, "converged": False, "warning": str(exc)}
    rel = state.get("relation")
    if rel is not None:
        write_relation(out / "relation.csv", rel, digest)
    if "residuals" in state:
        report["residuals"] = [float(r) for r in state["residuals"]]
    if "trials" in state:
        report["rhoR_trials"] = [[float(r), float(g)] for r, g in state["trials"]]
    write_json(out / "report.json", report, digest)


def run_analysis(inputs: dict, out: Path, digest: str, emit: dict, executor) -> AnalysisResult:
    try:
        res = analyze(executor=executor, **inputs)
    except NotConverged as exc:
        _write_failure(out, exc, inputs["cfg"].mode, digest)
        raise
    _write_result(out, res, digest, emit)
    return res


# -- synthesis ---------------------------------------------------------------

def write_synth(out: Path, case: SynthCase, raw: dict, syn: SynthResult, digest: str) -> dict:
    """Profiles, truth files and a ready-to-run analysis config."""
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, (h, p) in enumerate(zip(case.thicknesses, syn.profiles)):
        name = f"profile_{k}_{h:g}um.csv"
        write_profile(out / name, p, digest)
        entries.append({"path": name, "thickness": h, "label": f"{h:g} um"})
    write_path(out / "path_ref.csv", syn.reference, digest)
    write_json(out / "hugoniot.json",
               {"model": None if syn.hugoniot is None else syn.hugoniot.to_dict(),
                "state": None if syn.truth is None else syn.truth.to_dict()}, digest)
    run = {"rho0": case.material.rho0, "profiles": entries, "reference": "path_ref.csv",
           "compare_rho_min": syn.compare_rho_min, "analysis": dict(raw.get("analysis", {}))}
    if syn.hugoniot is not None:
        run["hugoniot"] = {"model": syn.hugoniot.to_dict()}
    if syn.hydro is not None:
        run_meta = {"energy_drift": [r.energy_drift for r in syn.hydro.runs],
                    "n_steps": [r.n_steps for r in syn.hydro.runs]}
        write_json(out / "hydro.json", run_meta, digest)
    write_json(out / "analyze.json", run, digest)
    return run


def _synth(args, executor):
    raw = load_config(args.case, CASE_SCHEMA)
    case = SynthCase.from_dict(raw)
    digest = config_digest(raw)
    syn = synthesize(case, seed=args.seed, executor=executor)
    run = write_synth(Path(args.out), case, raw, syn, digest)
    return raw, case, syn, run, digest


# -- commands ----------------------------------------------------------------

def cmd_analyze(args, executor) -> int:
    cfg = load_config(args.config, RUN_SCHEMA)
    cpath = Path(args.config)
    out = Path(args.out) if args.out else cpath.parent / cfg.get("out", ".")
    inputs = _run_inputs(cfg, cpath.parent)
    emit = dict(cfg.get("emit", {}))
    run_analysis(inputs, out, config_digest(cfg), emit, executor)
    return 0


def cmd_net(args, executor) -> int:
    cfg = load_config(args.config, RUN_SCHEMA)
    cpath = Path(args.config)
    out = Path(args.out) if args.out else cpath.parent / cfg.get("out", ".")
    inputs = _run_inputs(cfg, cpath.parent)
    digest = config_digest(cfg)
    res = analyze(executor=executor, **inputs)
    out.mkdir(parents=True, exist_ok=True)
    write_net(out, res, args.thickness, digest)
    return 0


def cmd_synth(args, executor) -> int:
    args.out = args.out or "."
    _synth(args, executor)
    return 0


def cmd_validate(args, executor) -> int:
    args.out = args.out or "."
    out = Path(args.out)
    raw, case, syn, run, digest = _synth(args, executor)
    modes = sorted({int(m) for m in args.modes.split(",")})
    if not set(modes) <= {1, 2, 3}:
        raise ConfigError(f"--modes must be a subset of 1,2,3, got {args.modes}")
    inputs = _run_inputs(run, out)
    plots = out / "plots"
    plots.mkdir(parents=True, exist_ok=True)
    for p in syn.profiles:
        write_dat(plots / f"profile_{p.thickness:g}um.dat", "t_ns u_km_s", [p.t, p.u], digest)
    ref = syn.reference
    write_dat(plots / "cL_truth.dat", "a_km_s cL_km_s", [ref.a, ref.cL], digest)
    write_dat(plots / "P_rho_truth.dat", "rho_g_cm3 P_GPa", [ref.rho, ref.P], digest)
    table = {}
    for m in modes:
        inputs["cfg"] = inputs["cfg"].replace(mode=m)
        res = run_analysis(inputs, out / f"mode{m}", digest, {}, executor)
        write_dat(plots / f"cL_mode{m}.dat", "a_km_s cL_km_s",
                  [res.relation.a_tab, res.relation.cL_tab], digest)
        write_dat(plots / f"P_rho_mode{m}.dat", "rho_g_cm3 P_GPa", [res.path.rho, res.path.P],
                  digest)
        entry = res.error.to_dict()
        if res.rhoR_search is not None:
            entry["rhoR"] = res.rhoR_search.rhoR
            entry["rhoR_trials"] = len(res.rhoR_search.trials)
            entry["junction_mismatch_km_s"] = res.relation.junction_mismatch()
        table[str(m)] = entry
    errs = [table[str(m)]["err"] for m in modes]
    ranked = sorted(modes, key=lambda m: table[str(m)]["err"])
    summary = {"case": case.name, "modes": table, "ranking": ranked,
               "ordering_ok": all(a > b for a, b in zip(errs, errs[1:])),
               "truth": None if syn.truth is None else syn.truth.to_dict()}
    write_json(out / "validation.json", summary, digest)
    for m in modes:
        log.info("mode %d: err=%.4g", m, table[str(m)]["err"])
    return 0


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the command; SUPPRESS keeps a
    # subcommand's defaults from overwriting values given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads (default 1)")
    common.add_argument("--seed", type=int, help="add seeded Gaussian noise to synthetic profiles")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    ap = argparse.ArgumentParser(prog="shockramp", parents=[common],
                                 description="Sound speed and loading path from "
                                             "multi-thickness free-surface velocity records.")
    ap.add_argument("--version", action="version", version=f"shockramp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="analyze measured profiles")
    p.add_argument("config")
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("synth", parents=[common], help="generate synthetic profiles and truth")
    p.add_argument("case")
    p.set_defaults(func=cmd_synth)
    p = sub.add_parser("validate", parents=[common],
                       help="synthesize a case and score analysis modes against truth")
    p.add_argument("case")
    p.add_argument("--modes", default="1,2,3", help="comma-separated subset of 1,2,3")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("net", parents=[common], help="write the characteristic net of one sample")
    p.add_argument("config")
    p.add_argument("--thickness", type=float, required=True, help="sample thickness (um)")
    p.set_defaults(func=cmd_net)
    return ap


GLOBAL_DEFAULTS = {"out": None, "threads": 1, "seed": None, "verbose": False}


@contextmanager
def _executor(threads: int):
    if threads <= 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=threads) as ex:
        yield ex


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    for name, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        with _executor(args.threads) as ex:
            return args.func(args, ex)
    except ShockRampError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
