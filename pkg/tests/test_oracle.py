from __future__ import annotations

import numpy as np
import pytest

from shockramp.core import HugoniotState, SoundSpeedRelation
from shockramp.errors import ShockFormation, StationInReleaseZone, UnstableStep
from shockramp.oracle.eos import MaterialModel, murnaghan_relation_exact
from shockramp.oracle.hydro import DriveProgram, measure_jump, run_hydro, simulate
from shockramp.oracle.moc import forward_characteristics
from shockramp.oracle.truth import extract_truth

AL = MaterialModel("murnaghan", 2.7, 76.0, 4.5)
MG = MaterialModel("mie-gruneisen", 2.318, 98.0, 4.0, 0.3)


def test_moc_linear_acoustics():
    c = 6.0
    rel = SoundSpeedRelation(a_tab=[0.0, 10.0], cL_tab=[c, c])
    drive = DriveProgram.ramp(0.5, 2.0)
    H = 12.0
    p = forward_characteristics(rel, drive, H, 200, t_end=6.0)
    late = p.t > H / c
    assert np.allclose(p.u[late], 2.0 * drive(p.t[late] - H / c), atol=1e-9)


def test_moc_shock_formation():
    rel = lambda a: 2.0 * (1.0 + 2.0 * np.asarray(a))  # noqa: E731
    with pytest.raises(ShockFormation):
        forward_characteristics(rel, DriveProgram.ramp(3.0, 0.5), 50.0, 400)


def test_hydro_zero_drive_at_rest():
    run = simulate(AL, DriveProgram.ramp(0.0, 1.0), 5.0, 50, 2.0)
    assert np.all(run.profile.u == 0.0)
    assert np.all(run.field.u == 0.0)
    truth = extract_truth(run.field, AL.rho0, 2.5)
    assert truth.P.tolist() == [0.0] and truth.rho.tolist() == [AL.rho0]


def test_hydro_unstable_with_oversized_step():
    with pytest.raises(UnstableStep):
        simulate(AL, DriveProgram.ramp(1.0, 1.0), 5.0, 100, 2.0, dt_fixed=0.05)


def test_pure_jump_closure_and_energy():
    drive = DriveProgram((0.0,), (1.5,))
    run = simulate(AL, drive, 20.0, 400, 2.0, snap_interval=0.05)
    assert run.energy_drift < 1e-4
    js = measure_jump(run.field, AL.rho0, (0.5, 1.8))
    dP, drho = js.closure_residuals(AL.rho0)
    assert abs(dP) < 0.01 and abs(drho) < 0.01
    truth = AL.hugoniot_state(1.5)
    assert js.Us == pytest.approx(truth.Us, rel=0.01)


def test_hugoniot_state_consistency():
    st = MG.hugoniot_state(3.5)
    assert isinstance(st, HugoniotState)
    assert st.PH == pytest.approx(st.rho0 * st.Us * st.UH, rel=1e-10)
    assert st.PH == pytest.approx(float(MG.hugoniot_pressure(1.0 / st.rhoH)), rel=1e-8)
    up, us = MG.hugoniot_table(5.0, 50)
    assert np.all(np.diff(us) > 0)


def test_principal_isentrope_matches_closed_form():
    path = AL.principal_isentrope(4.0)
    assert np.allclose(path.P, AL.K0 / AL.n * ((path.rho / AL.rho0) ** AL.n - 1.0), rtol=1e-10)
    assert np.allclose(path.cL, murnaghan_relation_exact(AL, path.a), rtol=1e-6)


def test_truth_from_ramp_matches_cold_curve():
    res = run_hydro(AL, DriveProgram.ramp(1.0, 5.0), 300, 30.0, [15.0], 5.0 + 15.0 / 5.3)
    fld = res.runs[0].field
    tr = extract_truth(fld, AL.rho0, 5.0, rho_window=(2.75, 3.05))
    cold = AL.K0 / AL.n * ((tr.rho / AL.rho0) ** AL.n - 1.0)
    assert np.max(np.abs(tr.P / cold - 1.0)) < 0.01


def test_truth_from_shock_ramp_below_hugoniot():
    drive = DriveProgram.shock_ramp(3.5, 1.0, 5.0, 1.0)
    res = run_hydro(MG, drive, 300, 30.0, [15.0], 3.0)
    fld = res.runs[0].field
    st = MG.hugoniot_state(3.5)
    tr = extract_truth(fld, MG.rho0, 5.0, rho_window=(st.rhoH * 1.01, st.rhoH * 1.08))
    PH_curve = MG.hugoniot_pressure(1.0 / tr.rho)
    assert np.all(tr.P < PH_curve)
    assert res.runs[0].energy_drift < 1e-4


def test_truth_in_release_zone():
    drive = DriveProgram.shock_ramp(3.5, 1.0, 3.5, 0.1)
    run = simulate(MG, drive, 10.0, 200, 4.0)
    with pytest.raises(StationInReleaseZone):
        extract_truth(run.field, MG.rho0, 9.9, rho_window=(MG.rho0 * 1.01, 10.0))
