import math
from dataclasses import replace

import numpy as np
import pytest

from swdlsim.analytic import (
    PassbandSpec,
    TonePlan,
    deviation_il,
    deviation_isolation,
    ideal_smatrix,
    il_filtering,
    modulated_tone_level,
)
from swdlsim.components import DelayLineModel, Ramp, SwitchModel
from swdlsim.engine import (
    CirculatorConfig,
    SimulationError,
    deviation_config,
    extract_spectrum,
    extract_sparams,
    group_delay,
    ideal_config,
    simulate_tone,
    snap_frequency,
    sparam_summary,
    switch_module_testbench,
)

DELTA = 250e-9


def db(x):
    return 20 * np.log10(np.abs(x))


@pytest.fixture(scope="module")
def ideal_run():
    cfg = ideal_config(DELTA, 1e9)
    f = snap_frequency(cfg, 37.3e6)
    return cfg, f, extract_sparams(cfg, [f])[0]


def test_ideal_circulation_matches_closed_form(ideal_run):
    cfg, f, S = ideal_run
    ref = ideal_smatrix(f, DELTA)
    through = [(1, 0), (2, 1), (3, 2), (0, 3)]
    for i, j in through:
        assert abs(db(S[i, j]) - db(ref[i, j])) <= 0.05
        assert abs(np.angle(S[i, j] / ref[i, j])) <= 0.01
    mask = np.ones((4, 4), bool)
    for i, j in through:
        mask[i, j] = False
    assert np.all(db(S[mask]) <= -60)


def test_static_mode_is_reciprocal():
    cfg = ideal_config(DELTA, 1e9, static=True)
    S = extract_sparams(cfg, [snap_frequency(cfg, 37.3e6)])[0]
    asym = np.max(np.abs(S - S.T)) / np.max(np.abs(S))
    assert 20 * np.log10(asym + 1e-300) <= -80


def test_reversed_phases_reverse_circulation():
    d = DELTA
    cfg = ideal_config(d, 1e9, control_phases=(d, 0.0, 3 * d, 2 * d))
    S = extract_sparams(cfg, [snap_frequency(cfg, 37.3e6)], source_ports=(1, 2))[0]
    assert db(S[0, 1]) == pytest.approx(0.0, abs=0.05)
    assert db(S[1, 0]) <= -60


def test_shifting_all_phases_by_a_period_changes_nothing(ideal_run):
    cfg, f, S = ideal_run
    P = cfg.period
    shifted = replace(cfg, control_phases=tuple(P + k * DELTA for k in range(4)))
    S2 = extract_sparams(shifted, [f])[0]
    np.testing.assert_allclose(S2, S, atol=1e-9)


def test_four_fold_symmetry(ideal_run):
    cfg, f, S = ideal_run
    for k in range(4):
        assert abs(db(S[(k + 1) % 4, k]) - db(S[1, 0])) <= 0.05


def test_group_delay_is_delta():
    cfg = ideal_config(DELTA, 1e9)
    step = cfg.sample_rate / cfg.window_samples
    f = [snap_frequency(cfg, 37.3e6) + k * step for k in range(3)]
    S = extract_sparams(cfg, f, source_ports=(1,))
    tau = group_delay(S[:, 1, 0], f)
    assert np.all(np.abs(tau - DELTA) <= 1 / cfg.sample_rate)


def test_energy_conservation_with_mixing():
    cfg = deviation_config(0.1, DELTA, 1e9)
    f = snap_frequency(cfg, 37.3e6)
    r = simulate_tone(cfg, 1, f)
    p_out = np.mean(np.sum(np.abs(r.reflected[:, r.window]) ** 2, axis=0))
    p_in = np.mean(np.abs(r.incident[0, r.window]) ** 2)
    assert abs(p_out / p_in - 1) <= 1e-3


@pytest.mark.parametrize("dd", [0.05, 0.2])
@pytest.mark.parametrize("longer", [True, False])
def test_deviation_matches_closed_forms(dd, longer):
    cfg = deviation_config(dd, DELTA, 1e9, longer=longer)
    f = snap_frequency(cfg, 37.3e6)
    r = simulate_tone(cfg, 1, f)
    assert -db(r.bin(2, f)) == pytest.approx(deviation_il(dd), abs=0.01)
    assert -db(r.bin(4, f)) == pytest.approx(deviation_isolation(dd), abs=0.01)
    through = extract_spectrum(cfg, 1, f, 2, result=r)
    leak = extract_spectrum(cfg, 1, f, 4, result=r)
    for n in (1, 2, 3):
        assert through.level_dbc(2 * n) == pytest.approx(modulated_tone_level("through", n, dd), abs=0.05)
        assert leak.level_dbc(2 * n) == pytest.approx(modulated_tone_level("isolated", n, dd), abs=0.05)


@pytest.mark.slow
def test_filtering_total_power_and_carrier():
    fm, fc = 1e6, 20e6
    bw = 5 * fm
    line = DelayLineModel("bandpass", fc - bw / 2, fc + bw / 2, 13 * DELTA, skirt=0.4 * fm)
    cfg = CirculatorConfig(delta=DELTA, delay_line_a=line, switch=SwitchModel.ideal(),
                           shunt_switches=False, sample_rate=1e9)
    r = simulate_tone(cfg, 1, fc)
    total = sum(extract_spectrum(cfg, 1, fc, p, n_tones=40, result=r).total_power_w() for p in (1, 2, 3, 4))
    closed = il_filtering(TonePlan(fc, fm), PassbandSpec("bandpass", fc - bw / 2, fc + bw / 2))
    # all tones together lose the in-band fraction; the through carrier alone loses it twice
    assert -10 * math.log10(total) == pytest.approx(closed, abs=0.1)
    assert -db(r.bin(2, fc)) == pytest.approx(2 * closed, abs=0.1)


def test_incommensurate_frequency_rejected():
    cfg = ideal_config(DELTA, 1e9)
    with pytest.raises(ValueError):
        extract_sparams(cfg, [snap_frequency(cfg, 37.3e6) + 1.0])
    with pytest.raises(ValueError):
        CirculatorConfig(delta=DELTA, f_mod=0.93e6, delay_line_a=DelayLineModel.all_pass(DELTA),
                         sample_rate=1e9, switch=SwitchModel.ideal())


def test_configuration_validation():
    with pytest.raises(ValueError):
        CirculatorConfig(sample_rate=1e9)  # below 20 * f_u for the default line
    with pytest.raises(ValueError):
        ideal_config(-1.0)
    with pytest.raises(ValueError):
        simulate_tone(ideal_config(DELTA, 1e9), 5, 37e6)


def test_unstable_network_is_reported():
    # a window whose power doubles, and one that diverged
    from swdlsim.engine import _check_growth

    w = np.ones((4, 1, 400)) * np.linspace(1, 2, 400)
    with pytest.raises(SimulationError):
        _check_growth(w)
    with pytest.raises(SimulationError):
        _check_growth(np.full((4, 1, 8), np.nan))


def test_testbench_ideal_loss_is_six_db():
    il = switch_module_testbench(SwitchModel.ideal(), 1e6, 37e6, 1e9)
    assert il == pytest.approx(20 * math.log10(2), abs=0.01)


def test_testbench_degrades_with_switch_time():
    losses = []
    for ratio in (0.0, 0.05, 0.1, 0.2, 0.3):
        ts = ratio * 500e-9
        sw = SwitchModel(1e-6, 1e12, ts, Ramp.LINEAR if ts else Ramp.INSTANT)
        losses.append(switch_module_testbench(sw, 1e6, 37e6, 1e9))
    assert np.all(np.diff(losses) > 0)


def test_summary_on_synthetic_curve():
    f = np.linspace(140e6, 170e6, 61)
    il = 5 + ((f - 155e6) / 5e6) ** 2
    S = np.zeros((f.size, 4, 4), dtype=complex)
    S[:, 1, 0] = 10 ** (-il / 20)
    S[:, 2, 0] = S[:, 3, 0] = 10 ** (-30 / 20)
    s = sparam_summary(f, S)
    assert s["min_il_db"] == pytest.approx(5.0)
    assert s["center_hz"] == pytest.approx(155e6)
    assert s["bandwidth_hz"] == pytest.approx(2 * math.sqrt(3) * 5e6, rel=0.02)
    assert s["isolation_in_band_db"] == pytest.approx(30.0)


@pytest.mark.slow
def test_switching_smooths_echo_ripple_in_group_delay():
    from swdlsim.components import frequency_response
    from swdlsim.engine import reference_config

    cfg = reference_config()
    line = replace(cfg.delay_line_a, echo_db=-20.0)
    cfg = replace(cfg, delay_line_a=line)
    # one echo ripple period (1 / 2 delta) around the band centre
    f = np.array(sorted({snap_frequency(cfg, x) for x in np.arange(154e6, 156.01e6, 0.125e6)}))
    circulating = group_delay(extract_sparams(cfg, f, source_ports=(1,))[:, 1, 0], f)
    static = group_delay(frequency_response(line, f)[:, 1, 0], f)
    assert np.mean(circulating) == pytest.approx(285e-9, abs=5e-9)
    assert np.var(circulating) <= np.var(static)


def test_ideal_port_two_is_input_delayed_by_delta():
    cfg = ideal_config(DELTA, 1e9)
    r = simulate_tone(cfg, 1, snap_frequency(cfg, 37.3e6))
    lag = int(round(DELTA * cfg.sample_rate))
    w = r.window
    delayed = r.incident[0, w.start - lag : r.n_samples - lag]
    assert np.max(np.abs(r.reflected[1, w] - delayed)) <= 1e-5
    assert np.max(np.abs(r.reflected[3, w])) <= 1e-5


def test_ideal_sync_has_no_modulated_tones():
    cfg = ideal_config(DELTA, 1e9)
    sp = extract_spectrum(cfg, 1, snap_frequency(cfg, 37.3e6), 2)
    assert all(t.power_dbm - sp.carrier_dbm < -100 for t in sp.tones if t.order != 0)
