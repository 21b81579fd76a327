"""scikit-learn style wrappers over the functional core.

The models here have no trainable state: ``fit`` validates parameters and
freezes the derived configuration, ``transform``/``predict`` evaluate it on a
column of inputs.  This makes them usable in pipelines and parameter grids.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import analytic
from .components import DelayLineModel, Ramp, SwitchModel, Variant
from .engine import CirculatorConfig, extract_sparams, snap_frequency

__all__ = ["DeviationTransformer", "FilteringLossTransformer", "CirculatorSimulator"]


def _column(X, name: str) -> np.ndarray:
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single column of {name}, got {X.shape[1]} columns")
    return X[:, 0]


class DeviationTransformer(TransformerMixin, BaseEstimator):
    """Map ``dd_ratio`` to [IL, isolation, through tones, isolated tones] in dB/dBc.

    Isolated-port tone levels are NaN at ``dd_ratio = 0`` (no main tone).
    """

    def __init__(self, n_tones: int = 3):
        self.n_tones = n_tones

    def fit(self, X=None, y=None):
        if self.n_tones < 1:
            raise ValueError("n_tones must be >= 1")
        if X is not None:
            _column(X, "dd_ratio")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        dd = _column(X, "dd_ratio")
        out = np.empty((dd.size, 2 + 2 * self.n_tones))
        tones = range(1, self.n_tones + 1)
        for i, r in enumerate(dd):
            through = [analytic.modulated_tone_level("through", n, r) for n in tones]
            leak = [analytic.modulated_tone_level("isolated", n, r) if r > 0 else np.nan for n in tones]
            out[i] = [analytic.deviation_il(r), analytic.deviation_isolation(r)] + through + leak
        return out


class FilteringLossTransformer(TransformerMixin, BaseEstimator):
    """Map normalised line bandwidth ``BW / f_m`` to the filtering IL (dB)."""

    def __init__(self, f_m: float = 1 / (4 * 285e-9), f_s: float = 155e6, shape: str = "bandpass",
                 carrier_position: float = 0.5, harmonic_range: int = 1000):
        self.f_m = f_m
        self.f_s = f_s
        self.shape = shape
        self.carrier_position = carrier_position
        self.harmonic_range = harmonic_range

    def fit(self, X=None, y=None):
        self.plan_ = analytic.TonePlan(self.f_s, self.f_m, self.harmonic_range)
        self.shape_ = analytic.Shape(self.shape)
        if not 0 <= self.carrier_position <= 1:
            raise ValueError("carrier_position must lie in [0, 1]")
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "plan_")
        bw = _column(X, "BW / f_m")
        order = np.argsort(bw, kind="stable")
        curve = analytic.il_curve(self.plan_, self.shape_, bw[order], self.carrier_position)
        out = np.empty(bw.size)
        out[order] = [il for _, il in curve]
        return out[:, None]


class CirculatorSimulator(BaseEstimator):
    """Time-domain S-parameter extraction for a column of carrier frequencies.

    ``predict`` returns the complex column ``S[:, source_port]`` with shape
    (n, 4); the frequencies actually simulated (snapped to the analysis grid)
    are kept in ``frequencies_``.
    """

    def __init__(self, delta: float = 285e-9, sample_rate: float = 3.2e9, r_on: float = 3.0,
                 r_off: float = 60e3, t_switch: float = 6e-9, f_l: float = 150e6, f_u: float = 160e6,
                 passband_il: float = 4.0, shunt_switches: bool = True, power_dbm: float = -10.0,
                 source_port: int = 1):
        self.delta = delta
        self.sample_rate = sample_rate
        self.r_on = r_on
        self.r_off = r_off
        self.t_switch = t_switch
        self.f_l = f_l
        self.f_u = f_u
        self.passband_il = passband_il
        self.shunt_switches = shunt_switches
        self.power_dbm = power_dbm
        self.source_port = source_port

    def fit(self, X=None, y=None):
        if self.source_port not in (1, 2, 3, 4):
            raise ValueError("source_port must be 1..4")
        ramp = Ramp.LINEAR if self.t_switch > 0 else Ramp.INSTANT
        line = DelayLineModel(Variant.BAND_PASS, self.f_l, self.f_u, self.delta, self.passband_il)
        self.config_ = CirculatorConfig(
            delta=self.delta,
            delay_line_a=line,
            switch=SwitchModel(self.r_on, self.r_off, self.t_switch, ramp),
            shunt_switches=self.shunt_switches,
            sample_rate=self.sample_rate,
        )
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "config_")
        f = _column(X, "frequencies (Hz)")
        if np.any(f <= 0):
            raise ValueError("frequencies must be positive")
        self.frequencies_ = np.array([snap_frequency(self.config_, v) for v in f])
        S = extract_sparams(self.config_, self.frequencies_, self.power_dbm, (self.source_port,))
        return S[:, :, self.source_port - 1]
