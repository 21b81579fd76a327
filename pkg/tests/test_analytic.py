import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swdlsim.analytic import (
    SATURATED_DB,
    PassbandSpec,
    TonePlan,
    deviation_il,
    deviation_isolation,
    ideal_smatrix,
    il_curve,
    il_filtering,
    modulated_tone_level,
    switch_time_effects,
)

from .oracles import brute_force_il

F_M = 1e6


def test_carrier_only_band_gives_three_db():
    plan = TonePlan(100e6, F_M)
    assert il_filtering(plan, PassbandSpec("bandpass", 99.9e6, 100.1e6)) == pytest.approx(3.0103, abs=1e-4)


def test_three_tone_band():
    # carrier high enough that the mirror band (-f_u, -f_l) holds no tone within range
    plan = TonePlan(1e9, F_M)
    got = il_filtering(plan, PassbandSpec("bandpass", 998.5e6, 1001.5e6))
    assert got == pytest.approx(-10 * math.log10(0.5 + 4 / math.pi ** 2), abs=1e-12)
    assert got == pytest.approx(0.432, abs=5e-4)


def test_empty_band_saturates():
    plan = TonePlan(100e6, 0.3e6)
    assert il_filtering(plan, PassbandSpec("bandpass", 500e6, 500.2e6)) == SATURATED_DB


def test_lowpass_limit_is_lossless():
    plan = TonePlan(1e6, F_M, harmonic_range=200_000)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        il = il_filtering(plan, PassbandSpec.lowpass(1e11))
    assert il == pytest.approx(0.0, abs=1e-5)


def test_tail_warning_when_range_is_short():
    with pytest.warns(RuntimeWarning):
        il_filtering(TonePlan(1e6, F_M, harmonic_range=10), PassbandSpec.lowpass(1e9))


def test_band_validation():
    with pytest.raises(ValueError):
        PassbandSpec("bandpass", 2.0, 1.0)
    with pytest.raises(ValueError):
        TonePlan(0.0, 1.0)
    with pytest.raises(ValueError):
        il_curve(TonePlan(1e8, F_M), "bandpass", [])


@given(
    st.floats(1.0, 200.0),
    st.floats(0.05, 5.0),
    st.floats(0.0, 150.0),
    st.floats(0.1, 60.0),
)
def test_matches_brute_force_enumeration(f_s, f_m, f_l, bw):
    f_u = f_l + bw
    n_max = 300
    plan = TonePlan(f_s, f_m, n_max)
    band = PassbandSpec("bandpass", f_l, f_u)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        got = il_filtering(plan, band)
    ref = brute_force_il(f_s, f_m, f_l, f_u, n_max)
    if math.isinf(ref):
        assert got == SATURATED_DB
    else:
        assert got == pytest.approx(ref, abs=1e-9)


@given(st.floats(1.0, 100.0), st.floats(0.2, 5.0), st.floats(0.5, 100.0), st.floats(0.0, 0.99))
def test_lowpass_dominates_bandpass(f_s, f_m, f_u, frac):
    f_l = frac * f_u
    plan = TonePlan(f_s, f_m, 300)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        low = il_filtering(plan, PassbandSpec.lowpass(f_u))
        band = il_filtering(plan, PassbandSpec("bandpass", f_l, f_u))
    assert low <= band + 1e-12


@pytest.mark.parametrize("shape", ["bandpass", "lowpass"])
@pytest.mark.parametrize("pos", [0.5, 0.25, 0.05])
def test_il_curve_is_non_increasing(shape, pos):
    grid = np.arange(0, 40.0001, 0.05)
    curve = il_curve(TonePlan(155e6, F_M), shape, grid, pos)
    il = np.array([v for _, v in curve])
    assert np.all(np.diff(il) <= 1e-12)


def test_centered_band_pass_steps_at_odd_tone_entries():
    grid = np.round(np.arange(0.01, 14, 0.01), 10)
    il = np.array([v for _, v in il_curve(TonePlan(155e6, F_M), "bandpass", grid, 0.5)])
    steps = grid[1:][np.diff(il) < -1e-9]
    # the open band admits tone n once BW/f_m exceeds 2|n|
    np.testing.assert_allclose(steps, [2.01, 6.01, 10.01])
    assert il[0] == pytest.approx(3.0103, abs=1e-4)


def test_deviation_formulas():
    assert deviation_il(0.1) == pytest.approx(0.9151, abs=1e-3)
    assert deviation_isolation(0.1) == pytest.approx(20.0, abs=1e-3)
    assert deviation_il(0.0) == 0.0
    assert deviation_isolation(0.0) == SATURATED_DB
    assert deviation_il(0.5) == pytest.approx(20 * math.log10(2))
    assert deviation_isolation(0.5) == pytest.approx(deviation_il(0.5))
    with pytest.raises(ValueError):
        deviation_il(1.0)


@given(st.floats(1e-9, 0.999))
def test_amplitude_bookkeeping(r):
    total = 10 ** (-deviation_il(r) / 20) + 10 ** (-deviation_isolation(r) / 20)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_tone_levels():
    assert modulated_tone_level("through", 1, 0.1) == pytest.approx(20 * math.log10(np.sinc(0.9)))
    assert modulated_tone_level("through", 1, 0.1) == pytest.approx(-19.23, abs=0.01)
    assert modulated_tone_level("isolated", 1, 0.1) == pytest.approx(-0.143, abs=1e-3)
    assert modulated_tone_level("through", 3, 0.0) == -SATURATED_DB
    with pytest.raises(ValueError):
        modulated_tone_level("through", 0, 0.1)
    with pytest.raises(ValueError):
        modulated_tone_level("isolated", 1, 0.0)


def test_switch_time_effects():
    ideal = switch_time_effects(0.0)
    assert ideal["il"] == 0.0
    assert all(v == -SATURATED_DB for v in ideal["tone_levels"].values())
    eff = switch_time_effects(0.1)
    assert eff["il"] == pytest.approx(0.915, abs=1e-3)
    assert eff["tone_levels"][1] == pytest.approx(-19.23, abs=0.01)
    with pytest.raises(ValueError):
        switch_time_effects(1.0)


@given(st.floats(0.0, 1e9), st.floats(1e-9, 1e-5))
def test_ideal_smatrix_unitary_and_cyclic(f, delta):
    s = ideal_smatrix(f, delta)
    np.testing.assert_allclose(s @ s.conj().T, np.eye(4), atol=1e-12)
    p = np.roll(np.eye(4), 1, axis=0)
    np.testing.assert_allclose(s, p * np.exp(-2j * np.pi * f * delta), atol=1e-12)


def test_ideal_smatrix_values():
    s = ideal_smatrix(0.0, 1e-6)
    assert s[1, 0] == s[2, 1] == s[3, 2] == s[0, 3] == 1
    q = ideal_smatrix(0.25e6, 1e-6)
    assert q[1, 0] == pytest.approx(-1j)
    assert q[0, 1] == 0


def test_edge_tones_excluded_as_a_pair():
    # f_s - 3 f_m and f_s - 6 f_m / 2 round differently; the pair must enter together
    f_m, f_s = 877.19e3, 155e6
    at_edge = il_filtering(TonePlan(f_s, f_m), PassbandSpec("bandpass", f_s - 3 * f_m, f_s + 3 * f_m))
    inner = il_filtering(TonePlan(f_s, f_m), PassbandSpec("bandpass", f_s - 2.9 * f_m, f_s + 2.9 * f_m))
    assert at_edge == inner
