from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from shockramp.cases import SynthCase, synthesize
from shockramp.core import AnalysisConfig
from shockramp.ingest import detect_breakout, extract_levels
from shockramp.pipeline import analyze
from shockramp.shock import solve_release_params

CASES = Path(__file__).resolve().parents[1] / "cases"


@pytest.fixture(scope="module")
def flagship():
    case = SynthCase.from_dict(json.loads((CASES / "flagship.json").read_text()))
    syn = synthesize(case)
    res = analyze(syn.profiles, AnalysisConfig(mode=3), case.material.rho0, syn.hugoniot,
                  reference=syn.reference, rho_min_compare=syn.compare_rho_min)
    return case, syn, res


def test_breakout_timing_against_shock_arrival(flagship):
    case, syn, _ = flagship
    dx = case.length / case.cells
    c_H = syn.truth.Us * syn.truth.rho0 / syn.truth.rhoH
    for p in syn.profiles:
        b = detect_breakout(p)
        # mesh transit: the time the shocked material needs to cross one cell
        assert abs(b.t_bo - p.thickness / syn.truth.Us) < 2.0 * dx / c_H + 0.02


def test_hydro_arrivals_are_causal(flagship):
    _, syn, _ = flagship
    pair = [syn.profiles[0], syn.profiles[-1]]
    lv = extract_levels(pair, 64, u_floor=0.05 * 5.0)
    assert np.all(lv.t_arrival[1] - lv.t_arrival[0] > 0)


def test_measured_state(flagship):
    _, syn, res = flagship
    assert res.state.Us == pytest.approx(syn.truth.Us, rel=1e-3)
    assert res.state.aH == pytest.approx(syn.truth.aH, rel=5e-3)


def test_mode3_relation_near_truth(flagship):
    _, syn, res = flagship
    rel = res.relation
    ref = syn.reference
    a = rel.a_tab[(rel.a_tab > rel.aH) & (rel.a_tab < 0.95 * rel.a_max)]
    truth = np.interp(a, ref.a, ref.cL)
    rms = np.sqrt(np.mean((rel(a) / truth - 1.0) ** 2))
    assert rms < 0.02


def test_mode3_junction_and_continuity(flagship):
    _, _, res = flagship
    rel, st = res.relation, res.state
    rp = solve_release_params(st, st.rhoR)
    assert rel(st.aH * (1 - 1e-12)) == pytest.approx(rp.cLR * (1 + rp.beta * st.aH), rel=1e-9)
    assert abs(rel.junction_mismatch()) < 1e-3
    P, rho = res.path.P, res.path.rho
    assert P[0] == st.PH and rho[0] == st.rhoH
    assert np.all(np.diff(P) > 0) and np.all(np.diff(rho) > 0)


def test_summary_is_json_ready(flagship):
    _, _, res = flagship
    s = res.summary()
    json.dumps(s)
    assert s["mode"] == 3 and s["release"]["cLR_km_s"] > 0
