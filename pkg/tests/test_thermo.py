from __future__ import annotations

from types import SimpleNamespace

import numpy as np
import pytest

from conftest import SI
from shockramp.core import SHOCK_AWARE, LoadingPath, SoundSpeedRelation
from shockramp.errors import AnchorOutsideRelation, RangeNotCovered
from shockramp.shock import solve_release_params
from shockramp.thermo import integrate_from_ambient, integrate_from_hugoniot, pressure_error, trim_path


def const(c, a_max=5.0):
    return SoundSpeedRelation(a_tab=[0.0, a_max], cL_tab=[c, c])


def test_ambient_start_and_constant_speed():
    rho0, c = 2.7, 6.0
    p = integrate_from_ambient(const(c), rho0)
    assert p.P[0] == 0.0 and p.rho[0] == rho0
    assert np.allclose(p.P, rho0 * c * p.a, rtol=1e-13)
    assert np.allclose(1.0 / p.rho, 1.0 / rho0 - p.a / (rho0 * c), rtol=1e-13)


def test_linear_speed_closed_form():
    cLR, beta, rho0 = 3.77, 1.355, 2.318
    a = np.linspace(0.0, 2.86, 4001)
    rel = SoundSpeedRelation(a_tab=a, cL_tab=cLR * (1 + beta * a))
    p = integrate_from_ambient(rel, rho0)
    aH = p.a[-1]
    P = rho0 * cLR * (aH + 0.5 * beta * aH ** 2)
    V = 1.0 / rho0 - np.log1p(beta * aH) / (beta * rho0 * cLR)
    assert p.P[-1] == pytest.approx(P, rel=1e-12)
    assert p.rho[-1] == pytest.approx(1.0 / V, rel=1e-8)


def test_hugoniot_anchor_and_constant_speed(si_state):
    c = 9.0
    rel = const(c, a_max=6.0)
    p = integrate_from_hugoniot(rel, si_state)
    assert p.P[0] == si_state.PH and p.rho[0] == si_state.rhoH
    assert p.up[0] == pytest.approx(si_state.UH)
    assert np.allclose(p.P, si_state.PH + si_state.rho0 * c * (p.a - si_state.aH), rtol=1e-13)
    with pytest.raises(AnchorOutsideRelation):
        integrate_from_hugoniot(const(c, a_max=1.0), si_state)


def test_ambient_equals_degenerate_hugoniot():
    rel = SoundSpeedRelation(a_tab=np.linspace(0, 3, 31), cL_tab=5.0 + np.linspace(0, 3, 31) ** 2)
    rest = SimpleNamespace(rho0=2.7, PH=0.0, rhoH=2.7, aH=0.0, UH=0.0)
    a = integrate_from_ambient(rel, 2.7)
    b = integrate_from_hugoniot(rel, rest)
    assert np.array_equal(a.a, b.a)
    assert np.allclose(a.P, b.P, rtol=0, atol=1e-13)
    assert np.allclose(a.rho, b.rho, rtol=1e-15)


def test_si_release_lands_on_rhoR(si_state):
    rp = solve_release_params(si_state, SI["rhoR"])
    a = np.linspace(si_state.aH, 6.0, 50)
    c_top = rp.cLR * (1 + rp.beta * si_state.aH)
    rel = SoundSpeedRelation(a_tab=a, cL_tab=c_top + 2.0 * (a - si_state.aH), mode=SHOCK_AWARE,
                             aH=si_state.aH, cLR=rp.cLR, beta=rp.beta)
    p = integrate_from_hugoniot(rel, si_state, a_min=0.0)
    assert p.a[0] == 0.0
    assert abs(p.P[0]) < 1e-9 * si_state.PH
    assert p.rho[0] == pytest.approx(SI["rhoR"], rel=1e-4)
    assert np.all(np.diff(p.P) > 0) and np.all(np.diff(p.rho) > 0)


def _path(rho, P):
    z = np.zeros_like(rho)
    return LoadingPath(a=z, cL=z, up=z, P=P, rho=rho)


def test_pressure_error_examples():
    rho = np.linspace(3.0, 4.0, 50)
    ref = _path(rho, 10.0 * (rho - 2.0) ** 2)
    assert pressure_error(ref, ref).err == 0.0
    big = _path(rho, 1.1 * ref.P)
    assert pressure_error(big, ref).err == pytest.approx(0.2 / 2.1, rel=1e-12)
    with pytest.raises(RangeNotCovered):
        pressure_error(ref, _path(rho + 5.0, ref.P))


def test_trim_path():
    rho = np.linspace(3.0, 4.0, 11)
    assert trim_path(_path(rho, rho), 3.5).rho.max() == pytest.approx(3.5)
