from __future__ import annotations

import numpy as np
import pytest

from shockramp.core import HugoniotState, VelocityProfile

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        ok = rep.passed
        prev = _CRITERIA.get(n, (True, text))[0]
        _CRITERIA[n] = (prev and ok, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, text = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")


# Si fixture: rho0, P_H, rho_H, a_H, rho_R and U_H of a silicon shock state.
SI = dict(rho0=2.318, PH=73.4, rhoH=3.871, aH=2.86, rhoR=2.55, UH=3.5)


@pytest.fixture
def si_state() -> HugoniotState:
    Us = SI["PH"] / (SI["rho0"] * SI["UH"])
    return HugoniotState(rho0=SI["rho0"], Us=Us, UH=SI["UH"], PH=SI["PH"], rhoH=SI["rhoH"],
                         aH=SI["aH"], rhoR=SI["rhoR"])


def step_profile(thickness=30.0, t_jump=2.0, u_top=6.36, rise=0.2, t_end=10.0, dt=0.002,
                 label="step") -> VelocityProfile:
    t = np.arange(0.0, t_end + 0.5 * dt, dt)
    u = np.clip((t - t_jump) / rise, 0.0, 1.0) * u_top
    return VelocityProfile(thickness, t, u, label)
