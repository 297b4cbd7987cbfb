from __future__ import annotations

import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from shockramp.cli import main
from shockramp.io import config_digest, read_path

CASES = Path(__file__).resolve().parents[1] / "cases"


@pytest.fixture(scope="module")
def ramp_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("ramp")
    assert main(["synth", str(CASES / "ramp_linear.json"), "--out", str(out)]) == 0
    return out


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return path


def test_synth_outputs(ramp_dir):
    names = sorted(p.name for p in ramp_dir.iterdir())
    assert names == ["analyze.json", "hugoniot.json", "path_ref.csv", "profile_0_20um.csv",
                     "profile_1_40um.csv"]
    digest = config_digest(json.loads((CASES / "ramp_linear.json").read_text()))
    first = (ramp_dir / "path_ref.csv").read_text().splitlines()[0]
    assert first == f"# shockramp 0.1.0 config_sha256={digest}"
    assert json.loads((ramp_dir / "hugoniot.json").read_text())["state"] is None
    ref = read_path(ramp_dir / "path_ref.csv")
    assert ref.P[0] == 0.0


def test_analyze_mode1_shock_free(ramp_dir, tmp_path):
    cfg = json.loads((ramp_dir / "analyze.json").read_text())
    cfg["mode"] = 1
    cfg["emit"] = {"net": [20.0]}
    path = _write(ramp_dir / "mode1.json", cfg)
    assert main(["analyze", str(path), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["converged"] and rep["mode"] == 1
    assert rep["error"]["err"] < 0.01
    assert rep["meta"]["config_sha256"] == config_digest(cfg)
    net = json.loads((tmp_path / "net_20.json").read_text())
    assert net["thickness_um"] == 20.0 and len(net["nodes"]["j"]) > 0
    assert (tmp_path / "relation.csv").read_text().splitlines()[1] == "a_km_s,cL_km_s"


def test_net_command(ramp_dir, tmp_path):
    cfg = ramp_dir / "analyze.json"
    assert main(["net", str(cfg), "--thickness", "40", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "net_40.json").exists()
    assert main(["net", str(cfg), "--thickness", "33", "--out", str(tmp_path)]) == 1


def test_not_converged_exit_3(ramp_dir, tmp_path):
    cfg = json.loads((ramp_dir / "analyze.json").read_text())
    cfg["analysis"] = {"mode": 1, "max_iter": 1, "tol_cl": 1e-14}
    path = _write(ramp_dir / "nc.json", cfg)
    assert main(["analyze", str(path), "--out", str(tmp_path)]) == 3
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["converged"] is False and "warning" in rep
    assert (tmp_path / "relation.csv").exists()


def test_config_errors(ramp_dir, tmp_path, capsys):
    cfg = json.loads((ramp_dir / "analyze.json").read_text())
    cfg["surprise"] = 1
    assert main(["analyze", str(_write(tmp_path / "a.json", cfg))]) == 1
    assert "surprise" in capsys.readouterr().err
    assert main(["analyze", str(tmp_path / "missing.json")]) == 1
    (tmp_path / "bad.json").write_text("{")
    assert main(["analyze", str(tmp_path / "bad.json")]) == 1
    assert main(["validate", str(CASES / "ramp_linear.json"), "--modes", "1,5",
                 "--out", str(tmp_path)]) == 1


def test_missing_profile_exit_2(ramp_dir, tmp_path):
    cfg = json.loads((ramp_dir / "analyze.json").read_text())
    cfg["profiles"][0]["path"] = "nope.csv"
    path = _write(ramp_dir / "missing.json", cfg)
    assert main(["analyze", str(path), "--out", str(tmp_path)]) == 2


def test_missing_thickness_exit_2(ramp_dir, tmp_path):
    cfg = json.loads((ramp_dir / "analyze.json").read_text())
    del cfg["profiles"][0]["thickness"]
    path = _write(ramp_dir / "nothick.json", cfg)
    assert main(["analyze", str(path), "--out", str(tmp_path)]) == 2


def test_validate_shock_free_mode1(tmp_path):
    assert main(["validate", str(CASES / "ramp_linear.json"), "--modes", "1",
                 "--out", str(tmp_path)]) == 0
    val = json.loads((tmp_path / "validation.json").read_text())
    assert val["modes"]["1"]["err"] < 0.01
    assert (tmp_path / "plots" / "cL_mode1.dat").read_text().startswith("# shockramp")


def test_mode3_on_shock_free_exit_4(tmp_path, capsys):
    assert main(["validate", str(CASES / "ramp_linear.json"), "--modes", "3",
                 "--out", str(tmp_path)]) == 4
    assert "no jump" in capsys.readouterr().err


def _case(tmp_path, **kw):
    case = {"material": {"kind": "murnaghan", "rho0": 2.7, "K0": 76.0, "n": 4.5},
            "drive": {"u_max": 0.0, "ramp": 1.0}, "thicknesses": [5.0, 10.0],
            "mesh": {"cells": 200, "length": 10.0}, "tail": 0.5}
    case.update(kw)
    return _write(tmp_path / "case.json", case)


def test_zero_drive_flat_profiles(tmp_path):
    assert main(["synth", str(_case(tmp_path)), "--out", str(tmp_path)]) == 0
    for f in tmp_path.glob("profile_*.csv"):
        u = np.loadtxt(f, delimiter=",", skiprows=2)[:, 1]
        assert np.all(u == 0.0)


def test_cfl_violation_exit_5(tmp_path):
    case = _case(tmp_path, drive={"u_max": 1.0, "ramp": 1.0},
                 mesh={"cells": 200, "length": 10.0, "dt": 0.05})
    assert main(["synth", str(case), "--out", str(tmp_path)]) == 5


def test_seeded_noise_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["synth", str(CASES / "ramp_linear.json"), "--seed", "7",
                     "--out", str(d)]) == 0
    assert (a / "profile_0_20um.csv").read_bytes() == (b / "profile_0_20um.csv").read_bytes()
    clean = tmp_path / "c"
    main(["synth", str(CASES / "ramp_linear.json"), "--out", str(clean)])
    assert (a / "profile_0_20um.csv").read_bytes() != (clean / "profile_0_20um.csv").read_bytes()


def test_global_flags_before_command(tmp_path):
    assert main(["--out", str(tmp_path), "--threads", "2", "synth",
                 str(CASES / "ramp_linear.json")]) == 0
    assert (tmp_path / "analyze.json").exists()
    shutil.rmtree(tmp_path)
