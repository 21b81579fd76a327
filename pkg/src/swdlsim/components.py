"""Terminal models for switches, delay lines and L-C matching sections."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .touchstone import TwoPortData, read_s2p

__all__ = [
    "Ramp",
    "SwitchPhase",
    "Variant",
    "SwitchModel",
    "DelayLineModel",
    "MatchingNetwork",
    "LineKernels",
    "KernelError",
    "switch_impedance",
    "switch_resistance",
    "frequency_response",
    "impulse_response",
    "match_two_port",
    "cascade",
    "flip",
    "abcd_to_s",
    "reference_switch",
    "reference_delay_line",
    "reference_matching",
]

TRUNCATION_LIMIT = 1e-4


class KernelError(ValueError):
    pass


class Ramp(str, Enum):
    INSTANT = "instant"
    LINEAR = "linear"


class SwitchPhase(str, Enum):
    ON = "on"
    OFF = "off"
    TURNING_ON = "turning_on"
    TURNING_OFF = "turning_off"


class Variant(str, Enum):
    BAND_PASS = "bandpass"
    LOW_PASS = "lowpass"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class SwitchModel:
    r_on: float = 3.0
    r_off: float = 60e3
    t_switch: float = 6e-9
    ramp: Ramp = Ramp.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "ramp", Ramp(self.ramp))
        if not (0 < self.r_on < self.r_off):
            raise ValueError("need 0 < r_on < r_off")
        if self.t_switch < 0:
            raise ValueError("t_switch must be >= 0")
        if self.ramp is Ramp.INSTANT and self.t_switch != 0:
            raise ValueError("an instant switch has t_switch = 0")

    @classmethod
    def ideal(cls, r_on: float = 1e-6, r_off: float = 1e12) -> "SwitchModel":
        return cls(r_on, r_off, 0.0, Ramp.INSTANT)


def switch_impedance(sw: SwitchModel, phase, tau: float = 0.0) -> float:
    """Resistance of ``sw`` ``tau`` seconds after its last control edge."""
    phase = SwitchPhase(phase)
    if phase is SwitchPhase.ON:
        return sw.r_on
    if phase is SwitchPhase.OFF:
        return sw.r_off
    if not (0 <= tau <= sw.t_switch):
        raise ValueError(f"tau={tau!r} outside [0, t_switch={sw.t_switch!r}]")
    frac = tau / sw.t_switch if sw.t_switch > 0 else 1.0
    if phase is SwitchPhase.TURNING_ON:
        return sw.r_off + (sw.r_on - sw.r_off) * frac
    return sw.r_on + (sw.r_off - sw.r_on) * frac


def switch_resistance(sw: SwitchModel, t, on_start: float, period: float) -> np.ndarray:
    """Resistance over time of a switch driven by a 50 % square wave.

    The control is high on ``[on_start, on_start + period/2)`` modulo
    ``period``.  Each edge starts a linear ramp lasting ``t_switch``.
    """
    t = np.asarray(t, dtype=float)
    half = period / 2
    tau = np.mod(t - on_start, period)
    r = np.where(tau < half, sw.r_on, sw.r_off).astype(float)
    if sw.t_switch > 0:
        ts = sw.t_switch
        rising = tau < ts
        r = np.where(rising, sw.r_off + (sw.r_on - sw.r_off) * tau / ts, r)
        since_off = tau - half
        falling = (since_off >= 0) & (since_off < ts)
        r = np.where(falling, sw.r_on + (sw.r_off - sw.r_on) * since_off / ts, r)
    return r


@dataclass(frozen=True)
class DelayLineModel:
    """Terminal behaviour of one delay line.

    Ideal variants are flat (``passband_il`` dB) over ``[f_l, f_u]`` with a
    linear phase of ``group_delay``.  Outside the band the response rolls off
    over ``skirt`` Hz with a raised cosine, which keeps the impulse response
    causal to within ``1e-4`` of its energy; ``None`` picks ``1.5 /
    group_delay``.  ``f_u = inf`` on a low-pass line gives an all-pass delay.
    ``echo_db`` adds a triple-transit echo ``2 * group_delay`` later.
    """

    variant: Variant = Variant.BAND_PASS
    f_l: float = 150e6
    f_u: float = 160e6
    group_delay: float = 285e-9
    passband_il: float = 0.0
    skirt: Optional[float] = None
    echo_db: Optional[float] = None
    sampled_response: Optional[TwoPortData] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.group_delay < 0:
            raise ValueError("group_delay must be >= 0")
        if self.variant is Variant.SAMPLED:
            if self.sampled_response is None:
                raise ValueError("a sampled line needs sampled_response")
            sv = np.linalg.svd(self.sampled_response.s, compute_uv=False)
            if np.max(sv) > 1 + 1e-9:
                raise ValueError("sampled response is not passive")
            return
        if self.variant is Variant.LOW_PASS and self.f_l != 0:
            object.__setattr__(self, "f_l", 0.0)
        if not (0 <= self.f_l < self.f_u):
            raise ValueError("need 0 <= f_l < f_u")
        if self.skirt is not None and self.skirt < 0:
            raise ValueError("skirt must be >= 0")

    @classmethod
    def from_touchstone(cls, path, group_delay: float = 285e-9) -> "DelayLineModel":
        data = read_s2p(path)
        return cls(
            Variant.SAMPLED,
            f_l=float(data.frequencies[0]),
            f_u=float(data.frequencies[-1]),
            group_delay=group_delay,
            sampled_response=data,
        )

    @classmethod
    def all_pass(cls, group_delay: float) -> "DelayLineModel":
        return cls(Variant.LOW_PASS, 0.0, math.inf, group_delay)

    @property
    def skirt_width(self) -> float:
        if self.skirt is not None:
            return self.skirt
        if self.group_delay > 0:
            return 1.5 / self.group_delay
        return 0.0

    @property
    def is_reciprocal_ideal(self) -> bool:
        return self.variant is not Variant.SAMPLED


def reference_switch() -> SwitchModel:
    """Switch used in the system simulation: 3 ohm / 60 kohm / 6 ns."""
    return SwitchModel(3.0, 60e3, 6e-9, Ramp.LINEAR)


def reference_delay_line() -> DelayLineModel:
    """Matched acoustic line: about 4 dB loss over 150-160 MHz, 285 ns delay."""
    return DelayLineModel(Variant.BAND_PASS, 150e6, 160e6, 285e-9, passband_il=4.0)


def reference_matching() -> "MatchingNetwork":
    return MatchingNetwork(280e-9, 2.73e-12)


def _band_amplitude(dl: DelayLineModel, f: np.ndarray) -> np.ndarray:
    fa = np.abs(f)
    w = dl.skirt_width
    amp = ((fa >= dl.f_l) & (fa <= dl.f_u)).astype(float)
    if w > 0 and math.isfinite(dl.f_u):
        above = (fa > dl.f_u) & (fa < dl.f_u + w)
        amp = np.where(above, 0.5 * (1 + np.cos(np.pi * (fa - dl.f_u) / w)), amp)
        if dl.variant is Variant.BAND_PASS:
            below = (fa < dl.f_l) & (fa > dl.f_l - w)
            amp = np.where(below, 0.5 * (1 + np.cos(np.pi * (dl.f_l - fa) / w)), amp)
    return amp


def _interp_sampled(data: TwoPortData, f: np.ndarray) -> np.ndarray:
    out = np.empty(f.shape + (2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            col = data.s[:, i, j]
            out[..., i, j] = np.interp(f, data.frequencies, col.real) + 1j * np.interp(
                f, data.frequencies, col.imag
            )
    return out


def frequency_response(dl: DelayLineModel, f) -> np.ndarray:
    """2x2 S matrix of the line at ``f`` (scalar -> (2, 2), array -> (n, 2, 2))."""
    f_arr = np.asarray(f, dtype=float)
    if dl.variant is Variant.SAMPLED:
        data = dl.sampled_response
        lo, hi = data.frequencies[0], data.frequencies[-1]
        if np.any((f_arr < lo) | (f_arr > hi)):
            raise ValueError(f"frequency outside sampled range [{lo}, {hi}] Hz")
        return _interp_sampled(data, f_arr)
    t = 10 ** (-dl.passband_il / 20) * _band_amplitude(dl, f_arr)
    t = t * np.exp(-2j * np.pi * f_arr * dl.group_delay)
    if dl.echo_db is not None:
        t = t * (1 + 10 ** (dl.echo_db / 20) * np.exp(-4j * np.pi * f_arr * dl.group_delay))
    s = np.zeros(f_arr.shape + (2, 2), dtype=complex)
    s[..., 1, 0] = t
    s[..., 0, 1] = t
    return s


@dataclass(frozen=True)
class MatchingNetwork:
    """Series inductor followed by a shunt capacitor on the device side."""

    l_m: float = 280e-9
    c_m: float = 2.73e-12

    def __post_init__(self):
        if not (self.l_m > 0 and self.c_m > 0):
            raise ValueError("l_m and c_m must be positive")

    @property
    def resonance(self) -> float:
        return 1.0 / (2 * math.pi * math.sqrt(self.l_m * self.c_m))


def abcd_to_s(abcd: np.ndarray, z0: float) -> np.ndarray:
    abcd = np.asarray(abcd, dtype=complex)
    a, b, c, d = abcd[..., 0, 0], abcd[..., 0, 1], abcd[..., 1, 0], abcd[..., 1, 1]
    den = a + b / z0 + c * z0 + d
    if np.any(np.abs(den) < 1e-300):
        raise ValueError("degenerate network: ABCD to S conversion is singular")
    s = np.empty(abcd.shape, dtype=complex)
    s[..., 0, 0] = (a + b / z0 - c * z0 - d) / den
    s[..., 0, 1] = 2 * (a * d - b * c) / den
    s[..., 1, 0] = 2 / den
    s[..., 1, 1] = (-a + b / z0 - c * z0 + d) / den
    return s


def match_two_port(mn: MatchingNetwork, f, z0: float = 50.0) -> np.ndarray:
    if z0 <= 0:
        raise ValueError("z0 must be positive")
    f_arr = np.asarray(f, dtype=float)
    if np.any(f_arr < 0):
        raise ValueError("f must be non-negative")
    w = 2 * np.pi * f_arr
    abcd = np.zeros(f_arr.shape + (2, 2), dtype=complex)
    # [[1, jwL], [0, 1]] @ [[1, 0], [jwC, 1]]
    abcd[..., 0, 0] = 1 - w ** 2 * mn.l_m * mn.c_m
    abcd[..., 0, 1] = 1j * w * mn.l_m
    abcd[..., 1, 0] = 1j * w * mn.c_m
    abcd[..., 1, 1] = 1.0
    return abcd_to_s(abcd, z0)


def flip(s: np.ndarray) -> np.ndarray:
    """Swap the two ports of a two-port."""
    return np.asarray(s)[..., ::-1, ::-1]


def cascade(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Connect port 2 of ``a`` to port 1 of ``b``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    loop = 1 - a[..., 1, 1] * b[..., 0, 0]
    if np.any(np.abs(loop) < 1e-12):
        raise ValueError("degenerate cascade: lossless resonant loop between the two-ports")
    s = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    s[..., 0, 0] = a[..., 0, 0] + a[..., 0, 1] * b[..., 0, 0] * a[..., 1, 0] / loop
    s[..., 1, 0] = a[..., 1, 0] * b[..., 1, 0] / loop
    s[..., 0, 1] = a[..., 0, 1] * b[..., 0, 1] / loop
    s[..., 1, 1] = b[..., 1, 1] + b[..., 1, 0] * a[..., 1, 1] * b[..., 0, 1] / loop
    return s


@dataclass(frozen=True)
class LineKernels:
    """Real FIR kernels (taps at lags 0..n-1) for each S entry of a line."""

    s11: np.ndarray
    s21: np.ndarray
    s12: np.ndarray
    s22: np.ndarray
    sample_rate: float

    def get(self, name: str) -> np.ndarray:
        return getattr(self, name)


def _response_on_grid(dl, f, matching, z0, sample_rate):
    if dl.variant is Variant.SAMPLED:
        data = dl.sampled_response
        lo, hi = data.frequencies[0], data.frequencies[-1]
        inside = (f >= lo) & (f <= hi)
        s = np.zeros(f.shape + (2, 2), dtype=complex)
        s[inside] = _interp_sampled(data, f[inside])
        # fade the table edges to zero over one skirt width
        w = min(dl.skirt_width, (hi - lo) / 4)
        if w > 0:
            taper = np.ones_like(f)
            lo_edge = inside & (f < lo + w)
            hi_edge = inside & (f > hi - w)
            taper[lo_edge] = 0.5 * (1 - np.cos(np.pi * (f[lo_edge] - lo) / w))
            taper[hi_edge] = 0.5 * (1 - np.cos(np.pi * (hi - f[hi_edge]) / w))
            s = s * taper[:, None, None]
    else:
        s = frequency_response(dl, f)
    if matching is not None:
        # bilinear frequency warp: the L-C section becomes a causal discrete-time
        # filter, so its kernel does not ring into negative lags
        f_w = sample_rate / np.pi * np.tan(np.pi * np.minimum(f, 0.4999 * sample_rate) / sample_rate)
        m = match_two_port(matching, f_w, z0)
        s = cascade(cascade(m, s), flip(m))
    return s


def impulse_response(
    dl: DelayLineModel,
    sample_rate: float,
    n_taps: int,
    matching: Optional[MatchingNetwork] = None,
    z0: float = 50.0,
) -> LineKernels:
    """Real FIR kernels of the line by inverse DFT of its frequency response.

    Raises :class:`KernelError` when more than ``1e-4`` of any kernel's energy
    falls outside lags ``[0, n_taps)`` (either acausal or too long).
    """
    if n_taps < 1:
        raise KernelError("n_taps must be >= 1")
    if n_taps / sample_rate < 4 * dl.group_delay:
        raise KernelError("n_taps must span at least 4 * group_delay")
    if math.isfinite(dl.f_u) and dl.variant is not Variant.SAMPLED and sample_rate <= 4 * dl.f_u:
        raise KernelError("sample_rate must exceed 4 * f_u")
    n_fft = 1 << max(12, int(math.ceil(math.log2(8 * n_taps))))
    f = np.fft.rfftfreq(n_fft, 1.0 / sample_rate)
    s = _response_on_grid(dl, f, matching, z0, sample_rate)
    taps = {}
    for name, (i, j) in (("s11", (0, 0)), ("s21", (1, 0)), ("s12", (0, 1)), ("s22", (1, 1))):
        h = np.fft.irfft(s[:, i, j], n_fft)
        energy = float(np.sum(h ** 2))
        if energy > 0:
            lost = float(np.sum(h[n_taps:] ** 2)) / energy
            if lost > TRUNCATION_LIMIT:
                raise KernelError(
                    f"{name} kernel loses {lost:.2e} of its energy outside {n_taps} taps"
                )
        taps[name] = h[:n_taps].copy()
    return LineKernels(sample_rate=sample_rate, **taps)


def with_delay(dl: DelayLineModel, group_delay: float) -> DelayLineModel:
    return replace(dl, group_delay=group_delay)
