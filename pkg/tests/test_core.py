from __future__ import annotations

import numpy as np
import pytest

from shockramp.core import (
    SHOCK_AWARE,
    AnalysisConfig,
    LoadingPath,
    SoundSpeedRelation,
    VelocityProfile,
    clamp_abscissa,
    validate_profile,
)
from shockramp.errors import ConfigError, NegativeVelocity, NonFiniteSample, NonMonotonicTime, TooFewSamples


def _pad(t, u, n=16):
    t = list(t) + [t[-1] + k + 1 for k in range(n - len(t))]
    u = list(u) + [u[-1]] * (n - len(u))
    return t, u


def test_minimal_profile_accepted():
    t, u = _pad([0, 1, 2], [0, 1, 2])
    p = validate_profile(VelocityProfile(10.0, t, u))
    assert p.t.size == 16 and p.thickness == 10.0


def test_duplicate_timestamp_rejected():
    t, u = _pad([0, 1, 1, 2], [0, 1, 2, 3])
    with pytest.raises(NonMonotonicTime):
        validate_profile(VelocityProfile(10.0, t, u))


def test_exact_duplicate_row_collapsed():
    t, u = _pad([0, 1, 1, 2], [0, 1, 1, 3], n=17)
    p = validate_profile(VelocityProfile(10.0, t, u))
    assert p.t.size == 16
    assert np.all(np.diff(p.t) > 0)


def test_non_finite_rejected():
    t, u = _pad([0, 1, 2], [0, np.nan, 2])
    with pytest.raises(NonFiniteSample):
        validate_profile(VelocityProfile(10.0, t, u))


def test_too_few_and_negative():
    with pytest.raises(TooFewSamples):
        validate_profile(VelocityProfile(10.0, [0, 1, 2], [0, 1, 2]))
    t, u = _pad([0, 1, 2], [0, -0.5, 2])
    with pytest.raises(NegativeVelocity):
        validate_profile(VelocityProfile(10.0, t, u))


def test_profile_arrays_read_only():
    p = VelocityProfile(1.0, np.arange(16.0), np.arange(16.0))
    with pytest.raises(ValueError):
        p.u[0] = 5.0


def test_unit_self_consistency():
    # g/cm^3 * (km/s)^2 = 1e3 kg/m^3 * 1e6 m^2/s^2 = 1e9 Pa = 1 GPa
    rho, u = 2.318, 3.5
    assert rho * u * u == pytest.approx(rho * 1e3 * (u * 1e3) ** 2 / 1e9, rel=1e-15)


def test_clamp_abscissa():
    assert clamp_abscissa(-1e-12) == 0.0
    with pytest.raises(ValueError):
        clamp_abscissa(-1e-6)


def test_relation_interpolation_and_flat_extrapolation():
    rel = SoundSpeedRelation(a_tab=[0.0, 1.0, 2.0], cL_tab=[5.0, 6.0, 8.0])
    assert rel(0.5) == pytest.approx(5.5)
    assert rel(1.5) == pytest.approx(7.0)
    assert rel(10.0) == 8.0
    assert rel.a_max == 2.0


def test_shock_aware_relation_uses_linear_segment_below_aH():
    rel = SoundSpeedRelation(a_tab=[2.0, 3.0], cL_tab=[10.0, 11.0], mode=SHOCK_AWARE, aH=2.0,
                             cLR=4.0, beta=0.5)
    assert rel(1.0) == pytest.approx(6.0)
    assert rel(2.5) == pytest.approx(10.5)
    assert rel.junction_mismatch() == pytest.approx(8.0 - 10.0)


@pytest.mark.parametrize("kw", [
    {"mode": 4}, {"n_levels": 4}, {"relax": 0.0}, {"relax": 1.5}, {"tol_cl": 0.0},
    {"breakout_frac": 1.0}, {"envelope": "mean"}, {"stretch": "other"},
])
def test_analysis_config_rejects_bad_values(kw):
    with pytest.raises(ConfigError):
        AnalysisConfig(**kw)


def test_bad_relation_tables():
    with pytest.raises(ConfigError):
        SoundSpeedRelation(a_tab=[0.0, 0.0], cL_tab=[1.0, 1.0])
    with pytest.raises(ConfigError):
        SoundSpeedRelation(a_tab=[0.0, 1.0], cL_tab=[1.0, -1.0])


def test_loading_path_length():
    z = np.zeros(3)
    assert len(LoadingPath(a=z, cL=z, up=z, P=z, rho=z + 1)) == 3
