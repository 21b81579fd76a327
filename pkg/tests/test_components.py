import numpy as np
import pytest
from hypothesis import given, strategies as st

from swdlsim.components import (
    DelayLineModel,
    KernelError,
    MatchingNetwork,
    Ramp,
    SwitchModel,
    Variant,
    cascade,
    flip,
    frequency_response,
    impulse_response,
    match_two_port,
    reference_delay_line,
    reference_matching,
    reference_switch,
    switch_impedance,
    switch_resistance,
)
from swdlsim.touchstone import TwoPortData, write_s2p

FS = 3.2e9


def test_switch_impedance_endpoints_and_midpoint():
    sw = reference_switch()
    assert switch_impedance(sw, "on") == 3.0
    assert switch_impedance(sw, "off") == 60e3
    assert switch_impedance(sw, "turning_on", 0.0) == 60e3
    assert switch_impedance(sw, "turning_on", 6e-9) == pytest.approx(3.0)
    assert switch_impedance(sw, "turning_off", 3e-9) == pytest.approx((3.0 + 60e3) / 2)
    with pytest.raises(ValueError):
        switch_impedance(sw, "turning_on", 7e-9)


def test_switch_model_validation():
    with pytest.raises(ValueError):
        SwitchModel(10.0, 5.0)
    with pytest.raises(ValueError):
        SwitchModel(3.0, 60e3, 1e-9, Ramp.INSTANT)
    assert SwitchModel.ideal().t_switch == 0


def test_switch_resistance_over_a_period():
    sw = reference_switch()
    t = np.array([0.0, 3e-9, 100e-9, 500e-9, 570e-9, 573e-9, 800e-9])
    r = switch_resistance(sw, t, 0.0, 1140e-9)
    np.testing.assert_allclose(r, [60e3, (3 + 60e3) / 2, 3.0, 3.0, 3.0, (3 + 60e3) / 2, 60e3])


def test_band_pass_response_in_and_out_of_band():
    dl = reference_delay_line()
    s = frequency_response(dl, 155e6)
    assert abs(s[1, 0]) == pytest.approx(10 ** (-4 / 20))
    assert s[0, 0] == 0
    assert abs(frequency_response(dl, 100e6)[1, 0]) == 0
    assert abs(frequency_response(dl, -155e6)[1, 0]) == pytest.approx(10 ** (-4 / 20))


def test_group_delay_of_linear_phase():
    dl = reference_delay_line()
    f = np.array([155e6, 156e6])
    ph = np.unwrap(np.angle(frequency_response(dl, f)[:, 1, 0]))
    assert -np.diff(ph)[0] / (2 * np.pi * 1e6) == pytest.approx(285e-9)


def test_delay_line_validation():
    with pytest.raises(ValueError):
        DelayLineModel(Variant.BAND_PASS, 160e6, 150e6)
    with pytest.raises(ValueError):
        DelayLineModel(Variant.SAMPLED)
    assert DelayLineModel(Variant.LOW_PASS, 10e6, 50e6).f_l == 0


@given(st.floats(0, 400e6), st.floats(0, 20), st.floats(0, 1e-6), st.sampled_from(list(Variant)[:2]))
def test_ideal_lines_are_passive_and_reciprocal(f, il, tau, variant):
    dl = DelayLineModel(variant, 120e6, 180e6, tau, il, echo_db=None)
    s = frequency_response(dl, f)
    assert np.linalg.svd(s, compute_uv=False).max() <= 1 + 1e-12
    assert s[0, 1] == s[1, 0]


@given(st.floats(0, 1e9), st.floats(1e-9, 1e-6), st.floats(1e-13, 1e-10))
def test_matching_section_is_lossless_and_reciprocal(f, l_m, c_m):
    s = match_two_port(MatchingNetwork(l_m, c_m), f)
    np.testing.assert_allclose(s.conj().T @ s, np.eye(2), atol=1e-9)
    assert s[0, 1] == pytest.approx(s[1, 0])


def test_matching_dc_limit_and_resonance():
    s = match_two_port(reference_matching(), 0.0)
    np.testing.assert_allclose(s, [[0, 1], [1, 0]], atol=1e-15)
    assert reference_matching().resonance == pytest.approx(182e6, rel=2e-3)


def test_cascade_identity_and_flip():
    rng = np.random.default_rng(3)
    a = 0.5 * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    thru = np.array([[0, 1], [1, 0]], dtype=complex)
    np.testing.assert_allclose(cascade(thru, a), a)
    np.testing.assert_allclose(cascade(a, thru), a)
    np.testing.assert_allclose(flip(flip(a)), a)
    np.testing.assert_allclose(flip(a)[0, 0], a[1, 1])
    with pytest.raises(ValueError):
        cascade(np.array([[0, 1], [1, 1]]), np.array([[1, 1], [1, 0]]))


def test_all_pass_zero_delay_kernel_is_unit_impulse():
    k = impulse_response(DelayLineModel.all_pass(0.0), 1e9, 64)
    expected = np.zeros(64)
    expected[0] = 1
    np.testing.assert_allclose(k.s21, expected, atol=1e-12)
    np.testing.assert_allclose(k.s11, 0, atol=1e-15)


def test_all_pass_delay_kernel_is_shifted_impulse():
    k = impulse_response(DelayLineModel.all_pass(37e-9), 1e9, 256)
    assert int(np.argmax(np.abs(k.s21))) == 37
    assert k.s21[37] == pytest.approx(1.0, abs=1e-12)


def test_band_pass_kernel_carries_a_tone():
    dl = reference_delay_line()
    n_taps = int(round(4 * dl.group_delay * FS)) + 1024
    k = impulse_response(dl, FS, n_taps)
    n = np.arange(3 * n_taps)
    f0 = 155e6
    x = np.exp(2j * np.pi * f0 * n / FS)
    y = np.convolve(x, k.s21)[n_taps : 2 * n_taps]
    ratio = y / x[n_taps : 2 * n_taps]
    assert np.max(np.abs(np.abs(ratio) - 10 ** (-4 / 20))) <= 1e-3
    # phase fixes the delay modulo one carrier period; compare in samples
    err = np.angle(np.mean(ratio) * np.exp(2j * np.pi * f0 * dl.group_delay))
    assert abs(err) / (2 * np.pi * f0) * FS <= 1


def _round_trip_floor_db(dl, n_taps=3648):
    k = impulse_response(dl, FS, n_taps)
    f = np.linspace(150e6, 160e6, 81)
    h = np.exp(-2j * np.pi * np.outer(f, np.arange(n_taps)) / FS) @ k.s21
    return 20 * np.log10(np.abs(h - frequency_response(dl, f)[:, 1, 0]).max())


def test_kernel_round_trip_in_band():
    # a wider skirt keeps the linear-phase precursor inside lag 0
    wide = DelayLineModel(Variant.BAND_PASS, 150e6, 160e6, 285e-9, 4.0, skirt=2.5 / 285e-9)
    assert _round_trip_floor_db(wide) <= -60


def test_default_skirt_round_trip_floor():
    # the default skirt trades part of the floor for the measured-like band edges
    assert _round_trip_floor_db(reference_delay_line()) <= -50


def test_kernel_errors():
    dl = reference_delay_line()
    with pytest.raises(KernelError):
        impulse_response(dl, FS, 0)
    with pytest.raises(KernelError):
        impulse_response(dl, FS, 100)
    with pytest.raises(KernelError):
        impulse_response(dl, 600e6, 4096)
    sharp = DelayLineModel(Variant.BAND_PASS, 150e6, 160e6, 285e-9, skirt=0.0)
    with pytest.raises(KernelError):
        impulse_response(sharp, FS, 4096)


def _synthetic_line(path, loss_db=4.0, tau=285e-9):
    f = np.arange(140e6, 170.001e6, 0.05e6)
    t = 10 ** (-loss_db / 20) * np.exp(-2j * np.pi * f * tau)
    s = np.zeros((f.size, 2, 2), dtype=complex)
    s[:, 0, 0] = s[:, 1, 1] = 0.05 * np.exp(-4j * np.pi * f * tau)
    s[:, 1, 0] = s[:, 0, 1] = t
    write_s2p(path, TwoPortData(f, s, 50.0), "synthetic line")


def test_sampled_line_from_touchstone(tmp_path):
    p = tmp_path / "line.s2p"
    _synthetic_line(p)
    dl = DelayLineModel.from_touchstone(p)
    s = frequency_response(dl, np.array([150e6, 155e6]))
    np.testing.assert_allclose(20 * np.log10(np.abs(s[:, 1, 0])), -4.0, atol=1e-9)
    ph = np.unwrap(np.angle(frequency_response(dl, np.array([155e6, 155.25e6]))[:, 1, 0]))
    assert -np.diff(ph)[0] / (2 * np.pi * 0.25e6) == pytest.approx(285e-9, rel=1e-6)
    with pytest.raises(ValueError):
        frequency_response(dl, 200e6)
    k = impulse_response(dl, FS, 4096)
    assert np.argmax(np.abs(k.s21)) == pytest.approx(285e-9 * FS, abs=2)


def test_sampled_line_must_be_passive(tmp_path):
    f = np.array([1e8, 2e8])
    s = np.zeros((2, 2, 2), dtype=complex)
    s[:, 1, 0] = s[:, 0, 1] = 1.2
    with pytest.raises(ValueError):
        DelayLineModel(Variant.SAMPLED, sampled_response=TwoPortData(f, s, 50.0))


def test_matching_folds_into_kernel():
    dl = reference_delay_line()
    mn = MatchingNetwork(20e-9, 4e-12)
    n_taps = 4096
    k = impulse_response(dl, FS, n_taps, matching=mn)
    f = np.linspace(151e6, 159e6, 17)
    f_w = FS / np.pi * np.tan(np.pi * f / FS)
    m = match_two_port(mn, f_w)
    ref = cascade(cascade(m, frequency_response(dl, f)), flip(m))
    basis = np.exp(-2j * np.pi * np.outer(f, np.arange(n_taps)) / FS)
    for name, (i, j) in (("s21", (1, 0)), ("s11", (0, 0))):
        err = np.abs(basis @ k.get(name) - ref[:, i, j])
        assert 20 * np.log10(err.max()) <= -50
