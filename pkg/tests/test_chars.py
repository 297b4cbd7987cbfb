from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockramp.cases import LinearRelation
from shockramp.chars import build_net, corrected_times, fit_cl, iterate, riemann_node
from shockramp.core import AnalysisConfig, SoundSpeedRelation
from shockramp.errors import DegenerateFit, NotConverged
from shockramp.ingest import LevelSet, extract_levels
from shockramp.oracle.hydro import DriveProgram
from shockramp.oracle.moc import forward_characteristics


def const(c):
    return SoundSpeedRelation(a_tab=[0.0, 100.0], cL_tab=[c, c])


def test_riemann_examples():
    assert riemann_node(2.0, 2.0) == (2.0, 0.0)
    assert riemann_node(3.0, 5.0) == (4.0, 1.0)
    UH, aH = 3.5, 2.86
    u, a = riemann_node(UH - aH, UH + aH)
    assert (u, a) == pytest.approx((UH, aH))


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 50, allow_nan=False), st.floats(0, 50, allow_nan=False))
def test_riemann_identity(x, y):
    lo, hi = min(x, y), max(x, y)
    u, a = riemann_node(lo, hi)
    assert abs((u + a) - hi) <= np.spacing(hi)
    assert abs((u - a) - lo) <= np.spacing(max(hi, 1e-300))


def test_single_level_net():
    net = build_net(np.array([1.0]), np.array([5.0]), 30.0, const(10.0))
    assert net.launch[0] == pytest.approx(5.0 - 3.0)
    assert corrected_times(net, [10.0])[0] == pytest.approx(5.0)


def test_constant_speed_net_has_no_correction():
    u = np.linspace(0.0, 2.0, 12)
    t = 3.0 + np.linspace(0.0, 1.0, 12)
    net = build_net(u, t, 30.0, const(10.0))
    assert np.allclose(corrected_times(net, np.full(12, 10.0)), t)


def test_fit_cl():
    assert fit_cl([20.0, 40.0], [[2.0], [4.0]])[0] == pytest.approx(10.0)
    assert fit_cl([10.0, 20.0, 30.0], [[1.0], [2.0], [3.0]])[0] == pytest.approx(10.0)
    with pytest.raises(DegenerateFit):
        fit_cl([20.0, 40.0], [[2.0], [2.0]])
    with pytest.raises(DegenerateFit):
        fit_cl([20.0], [[2.0]])


def test_constant_speed_converges_in_one_iteration():
    u = np.linspace(0.0, 2.0, 16)
    tau = np.linspace(0.0, 1.5, 16)
    H = np.array([20.0, 40.0])
    lv = LevelSet(u_levels=u, t_arrival=np.array([h / 8.0 + tau for h in H]), thicknesses=H)
    it = iterate(lv, AnalysisConfig(mode=1, n_levels=16))
    assert it.n_iter == 1
    assert np.allclose(it.relation.cL_tab, 8.0)


def _ramp_levels(M, rel=LinearRelation(5.0, 0.3), H=(20.0, 40.0)):
    drive = DriveProgram.ramp(1.5, 6.0)
    profs = [forward_characteristics(rel, drive, h, 1000, t_end=6.0 + h / 5.0 + 1.0) for h in H]
    return extract_levels(profs, M)


def test_net_causality():
    rel = LinearRelation(5.0, 0.3)
    lv = _ramp_levels(32)
    it = iterate(lv, AnalysisConfig(mode=1, n_levels=32), keep_nets=True)
    for net in it.nets:
        phys = net.physical
        j, i = np.nonzero(phys & ~np.eye(net.h.shape[0], dtype=bool))
        # along each reflected wave i the node times increase with j
        for col in np.unique(i):
            rows = np.sort(j[i == col])
            assert np.all(np.diff(net.t[rows, col]) > 0)
        # compression segments move forward, reflected segments move backward
        ok = (phys[j, i] & phys[j, i + 1])
        assert np.all(net.h[j, i][ok] < net.h[j, i + 1][ok])
    c = np.asarray(rel(it.a_levels))
    assert np.max(np.abs(it.c_levels / c - 1.0)) < 0.01


def test_fixed_point_self_consistency():
    """Profiles generated from a converged relation reproduce that relation."""
    lv = _ramp_levels(64)
    cfg = AnalysisConfig(mode=1, n_levels=64)
    first = iterate(lv, cfg).relation
    drive = DriveProgram.ramp(1.5, 6.0)
    profs = [forward_characteristics(first, drive, h, 1000, t_end=6.0 + h / 5.0 + 1.0)
             for h in (20.0, 40.0)]
    again = iterate(extract_levels(profs, 64), cfg).relation
    a = first.a_tab[first.a_tab < 0.98 * first.a_max]
    rel_err = np.abs(again(a) / first(a) - 1.0)
    assert rel_err.max() < 1e-3


def test_not_converged_carries_state():
    lv = _ramp_levels(32)
    with pytest.raises(NotConverged) as exc:
        iterate(lv, AnalysisConfig(mode=1, n_levels=32, max_iter=1, tol_cl=1e-14))
    assert "relation" in exc.value.state and len(exc.value.state["residuals"]) == 1
