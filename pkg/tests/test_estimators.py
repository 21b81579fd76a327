import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from swdlsim.analytic import PassbandSpec, TonePlan, deviation_il, deviation_isolation, il_filtering
from swdlsim.estimators import CirculatorSimulator, DeviationTransformer, FilteringLossTransformer


def test_deviation_transformer_columns():
    X = np.array([[0.0], [0.1], [0.4]])
    out = DeviationTransformer(n_tones=2).fit_transform(X)
    assert out.shape == (3, 6)
    assert out[1, 0] == pytest.approx(deviation_il(0.1))
    assert out[1, 1] == pytest.approx(deviation_isolation(0.1))
    assert np.isnan(out[0, 4:]).all()
    assert np.isfinite(out[2]).all()


def test_deviation_transformer_rejects_bad_input():
    with pytest.raises(NotFittedError):
        DeviationTransformer().transform([[0.1]])
    with pytest.raises(ValueError):
        DeviationTransformer(n_tones=0).fit()
    with pytest.raises(ValueError):
        DeviationTransformer().fit_transform(np.zeros((3, 2)))


def test_filtering_transformer_matches_functional_core_in_any_order():
    t = FilteringLossTransformer(f_m=1e6, f_s=155e6).fit()
    X = np.array([[7.0], [0.5], [3.0]])
    out = t.transform(X)[:, 0]
    for bw, il in zip(X[:, 0], out):
        band = PassbandSpec("bandpass", 155e6 - bw * 1e6 / 2, 155e6 + bw * 1e6 / 2)
        assert il == pytest.approx(il_filtering(TonePlan(155e6, 1e6), band), abs=1e-12)
    assert out[1] == pytest.approx(10 * math.log10(2), abs=1e-3)


def test_estimators_clone_and_pipeline():
    pipe = make_pipeline(clone(FilteringLossTransformer(shape="lowpass")))
    assert pipe.fit_transform([[1.0], [2.0]]).shape == (2, 1)
    assert clone(CirculatorSimulator(delta=250e-9)).get_params()["delta"] == 250e-9
    with pytest.raises(ValueError):
        FilteringLossTransformer(carrier_position=2.0).fit()


def test_circulator_simulator_ideal_switches():
    sim = CirculatorSimulator(delta=250e-9, sample_rate=4e9, r_on=1e-6, r_off=1e12, t_switch=0.0,
                              f_l=30e6, f_u=45e6, passband_il=0.0, shunt_switches=False)
    S = sim.fit(None).predict([[37.3e6]])
    assert S.shape == (1, 4)
    assert sim.frequencies_[0] == pytest.approx(37.3e6, abs=sim.config_.sample_rate / sim.config_.window_samples)
    # band-limited lines cost part of the comb, the rest still circulates forward
    assert abs(S[0, 1]) > 10 * max(abs(S[0, 2]), abs(S[0, 3]))
    with pytest.raises(ValueError):
        sim.predict([[-1.0]])
    with pytest.raises(ValueError):
        CirculatorSimulator(source_port=7).fit()
