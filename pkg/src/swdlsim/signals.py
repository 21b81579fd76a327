"""Switch control waveforms and their Fourier series.

The four gating signals L1, R1, L2, R2 have period ``4 * delta`` and 50 % duty.
T1/T2 describe the through/leak windows produced by a delay deviation and T3
the window left open when every switch needs ``switch_time`` to turn on; all
three have period ``2 * delta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict

import numpy as np

__all__ = [
    "Kind",
    "SeriesKind",
    "ControlWaveform",
    "FourierSeries",
    "control_value",
    "fourier_coefficient",
    "fourier_series",
    "sample_waveform",
    "dft_coefficients",
]

DEFAULT_N_MAX = 200


class Kind(str, Enum):
    L1 = "L1"
    R1 = "R1"
    L2 = "L2"
    R2 = "R2"
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"


class SeriesKind(str, Enum):
    A = "A"
    T1C = "T1C"
    T2C = "T2C"
    T3C = "T3C"


# delay of each ladder waveform behind L1, in units of delta
_LADDER_SHIFT = {Kind.L1: 0, Kind.R1: 1, Kind.L2: 2, Kind.R2: 3}


@dataclass(frozen=True)
class ControlWaveform:
    kind: Kind
    delta: float
    delay_deviation: float = 0.0
    switch_time: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be a positive finite time, got {self.delta!r}")
        if abs(self.delay_deviation) >= 2 * self.delta:
            raise ValueError("|delay_deviation| must be smaller than 2*delta")
        if not (0 <= self.switch_time < 2 * self.delta):
            raise ValueError("switch_time must lie in [0, 2*delta)")

    @property
    def period(self) -> float:
        if self.kind in _LADDER_SHIFT:
            return 4 * self.delta
        return 2 * self.delta


def _heaviside(x):
    # H(0) = 1 everywhere
    return (np.asarray(x) >= 0).astype(float)


def control_value(w: ControlWaveform, t):
    """Evaluate a control waveform at time(s) ``t``.

    The Heaviside sums are evaluated literally, restricted to the five terms
    around ``t`` whose edges can bracket it. Accepts scalars or arrays.
    Every term is taken on the same fractional phase, so T1 + T2 telescopes
    to exactly 1 and the ladder shifts are exact multiples of ``delta``.
    """
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise ValueError("t must be finite")
    if w.kind in _LADDER_SHIFT:
        u = (t_arr - _LADDER_SHIFT[w.kind] * w.delta) / (4 * w.delta)
        v = u - np.floor(u)
        val = np.zeros_like(v)
        for m in range(-2, 3):
            val += _heaviside(v - m) - _heaviside(v - m - 0.5)
    else:
        u = t_arr / (2 * w.delta)
        v = u - np.floor(u)
        if w.kind is Kind.T3:
            r = w.switch_time / (2 * w.delta)
        else:
            r = abs(w.delay_deviation) / (2 * w.delta)
        val = np.zeros_like(v)
        for m in range(-2, 3):
            if w.kind is Kind.T2:
                val += _heaviside(v - m) - _heaviside(v - m - r)
            else:
                val += _heaviside(v - m - r) - _heaviside(v - m - 1)
    val = w.amplitude * val
    if np.ndim(t) == 0:
        return float(val)
    return val


def _validate_ratio(name, value):
    if not (0 <= value < 1):
        raise ValueError(f"{name} must lie in [0, 1), got {value!r}")


def fourier_coefficient(
    kind,
    n: int,
    delta: float = 1.0,
    delay_deviation: float = 0.0,
    switch_time: float = 0.0,
    convention: str = "waveform",
) -> complex:
    """Closed-form Fourier coefficient of a gating waveform.

    Parameters
    ----------
    kind : SeriesKind or str
        ``A`` is the 50 % square wave L1 (fundamental f_m).  ``T1C``/``T2C``
        are the through and leak windows under delay deviation and ``T3C`` is
        the per-line transmission window under finite switch time; these three
        live on the ``2 * f_m`` comb.
    n : int
        Harmonic index.
    convention : {"waveform", "published"}
        ``"waveform"`` (default) returns the exact coefficient of the waveform
        as :func:`control_value` defines it, so it agrees with the DFT of
        sampled data.  ``"published"`` returns the textbook forms
        ``-j*sign(n)*w*sinc(n*w)``; these have the same magnitude but drop the
        window-centre phase term.

    Notes
    -----
    ``T3C`` is normalised per delay line: each line passes the window
    ``[t_s, 2*delta)`` of every ``4*delta`` period, so its DC term is
    ``(1 - t_s/2delta)/2``.  The two lines add coherently on the ``2*f_m``
    comb, which is why the combined T3 waveform of :func:`control_value`
    has exactly twice these coefficients.
    """
    kind = SeriesKind(kind)
    n = int(n)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if convention not in ("waveform", "published"):
        raise ValueError(f"unknown convention {convention!r}")

    if kind is SeriesKind.A:
        if n == 0:
            return 0.5 + 0j
        if n % 2 == 0:
            return 0j
        if convention == "published":
            return complex(-1j * math.copysign(1, n) / 2 * np.sinc(n / 2))
        return complex(0.5 * np.sinc(n / 2) * np.exp(-1j * math.pi * n / 2))

    if kind is SeriesKind.T3C:
        s = switch_time / (2 * delta)
        _validate_ratio("switch_time / (2*delta)", s)
        width, start, scale = 1 - s, s, 0.5
    else:
        r = abs(delay_deviation) / (2 * delta)
        _validate_ratio("|delay_deviation| / (2*delta)", r)
        if kind is SeriesKind.T1C:
            width, start, scale = 1 - r, r, 1.0
        else:
            width, start, scale = r, 0.0, 1.0

    if n == 0:
        return complex(scale * width)
    mag = scale * width * np.sinc(n * width)
    if convention == "published":
        return complex(-1j * math.copysign(1, n) * mag)
    # window [start, start + width) of a unit period, centred at start + width/2
    return complex(mag * np.exp(-1j * math.pi * n * (2 * start + width)))


@dataclass(frozen=True)
class FourierSeries:
    kind: SeriesKind
    coefficients: Dict[int, complex]
    fundamental: float
    n_max: int
    extras: dict = field(default_factory=dict)

    def __getitem__(self, n: int) -> complex:
        return self.coefficients[n]

    def parseval_residual(self) -> float:
        """``1 - sum 2|c_n|^2`` for the square wave (mean of L1^2 is 1/2)."""
        power = sum(abs(c) ** 2 for c in self.coefficients.values())
        if self.kind is SeriesKind.A:
            return 1.0 - 2 * power
        # for T-kinds the waveform is 0/1 valued with mean equal to c_0
        mean = self.coefficients[0].real
        if self.kind is SeriesKind.T3C:
            mean, power = 2 * mean, 4 * power
        return mean - power

    def reconstruct(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for n, c in self.coefficients.items():
            out += c * np.exp(2j * np.pi * n * self.fundamental * t)
        return out.real


def fourier_series(
    kind,
    delta: float,
    n_max: int = DEFAULT_N_MAX,
    delay_deviation: float = 0.0,
    switch_time: float = 0.0,
    convention: str = "waveform",
) -> FourierSeries:
    kind = SeriesKind(kind)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    f_m = 1.0 / (4 * delta)
    fundamental = f_m if kind is SeriesKind.A else 2 * f_m
    coeffs = {
        n: fourier_coefficient(kind, n, delta, delay_deviation, switch_time, convention)
        for n in range(-n_max, n_max + 1)
    }
    return FourierSeries(kind, coeffs, fundamental, n_max)


def _samples_per_period(period: float, sample_rate: float) -> int:
    m = period * sample_rate
    m_int = int(round(m))
    if m_int < 1 or abs(m - m_int) > 1e-6 * max(1.0, m):
        raise ValueError(
            f"sample_rate * period = {m!r} is not an integer; choose a commensurate sample rate"
        )
    return m_int


def sample_waveform(
    w: ControlWaveform, sample_rate: float, duration: float, offset: float = 0.0
) -> np.ndarray:
    """Sample ``w`` at ``offset + k / sample_rate`` over ``duration``.

    ``duration`` must hold an integer number of periods so the series can be
    used as a leakage-free DFT oracle.  Use ``offset = 0.5 / sample_rate`` to
    sample at cell midpoints (second-order accurate DFT coefficients).
    """
    if sample_rate * 4 * w.delta < 64:
        raise ValueError("sample_rate must resolve at least 64 samples per 4*delta")
    n_periods = duration / w.period
    if n_periods < 1 or abs(n_periods - round(n_periods)) > 1e-9 * max(1.0, n_periods):
        raise ValueError("duration must be an integer multiple of the waveform period")
    per = _samples_per_period(w.period, sample_rate)
    n = per * int(round(n_periods))
    t = offset + np.arange(n) / sample_rate
    return control_value(w, t)


def dft_coefficients(
    samples: np.ndarray, samples_per_period: int, harmonics, offset_fraction: float = 0.0
) -> np.ndarray:
    """Fourier coefficients of a sampled periodic signal, by FFT.

    ``offset_fraction`` is the sample-time offset in units of the sample
    interval; its linear phase is removed so that coefficients refer to t=0.
    """
    samples = np.asarray(samples, dtype=float)
    n_total = samples.size
    if n_total % samples_per_period:
        raise ValueError("series must contain whole periods")
    n_periods = n_total // samples_per_period
    spec = np.fft.fft(samples) / n_total
    harmonics = np.asarray(harmonics, dtype=int)
    bins = (harmonics * n_periods) % n_total
    phase = np.exp(-2j * np.pi * harmonics * offset_fraction / samples_per_period)
    return spec[bins] * phase
