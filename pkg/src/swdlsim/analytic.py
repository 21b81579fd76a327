"""Closed-form performance predictions for the switched delay-line circulator."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

import numpy as np

__all__ = [
    "SATURATED_DB",
    "Shape",
    "Port",
    "TonePlan",
    "PassbandSpec",
    "square_wave_power",
    "il_filtering",
    "il_curve",
    "deviation_il",
    "deviation_isolation",
    "modulated_tone_level",
    "switch_time_effects",
    "ideal_smatrix",
    "to_db",
]

#: stand-in for +/- infinity in dB outputs (keeps CSV columns numeric)
SATURATED_DB = 300.0
TAIL_TOLERANCE = 1e-6
EDGE_TOLERANCE = 1e-9  # in units of f_m


class Shape(str, Enum):
    BAND_PASS = "bandpass"
    LOW_PASS = "lowpass"


class Port(str, Enum):
    THROUGH = "through"
    ISOLATED = "isolated"


@dataclass(frozen=True)
class TonePlan:
    f_s: float
    f_m: float
    harmonic_range: int = 1000

    def __post_init__(self):
        if not self.f_s > 0:
            raise ValueError("f_s must be positive")
        if not self.f_m > 0:
            raise ValueError("f_m must be positive")
        if self.harmonic_range < 1:
            raise ValueError("harmonic_range must be >= 1")

    @classmethod
    def for_delay(cls, f_s: float, delta: float, harmonic_range: int = 1000) -> "TonePlan":
        return cls(f_s, 1.0 / (4 * delta), harmonic_range)


@dataclass(frozen=True)
class PassbandSpec:
    shape: Shape
    f_l: float
    f_u: float

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape(self.shape))
        if self.shape is Shape.LOW_PASS and self.f_l != 0:
            raise ValueError("a low-pass band has f_l = 0")
        if not (0 <= self.f_l < self.f_u):
            raise ValueError(f"need 0 <= f_l < f_u, got f_l={self.f_l}, f_u={self.f_u}")

    @classmethod
    def lowpass(cls, f_u: float) -> "PassbandSpec":
        return cls(Shape.LOW_PASS, 0.0, f_u)


def to_db(amplitude_ratio: float) -> float:
    """Loss in dB for an amplitude ratio, saturating at :data:`SATURATED_DB`."""
    if amplitude_ratio <= 0:
        return SATURATED_DB
    # + 0.0 folds -0.0 into 0.0
    return min(-20.0 * math.log10(amplitude_ratio), SATURATED_DB) + 0.0


def _level_db(amplitude_ratio: float) -> float:
    if amplitude_ratio <= 0:
        return -SATURATED_DB
    return max(20.0 * math.log10(amplitude_ratio), -SATURATED_DB)


def square_wave_power(n) -> np.ndarray:
    """``|a_n|^2`` of the 50 % square wave, exact zeros at even ``n != 0``."""
    n = np.asarray(n)
    p = (np.sin(np.pi * n / 2) / (np.pi * np.where(n == 0, 1, n))) ** 2
    p = np.where(n % 2 == 0, 0.0, p)
    return np.where(n == 0, 0.25, p)


def _in_band_mask(freqs: np.ndarray, band: PassbandSpec, tol: float) -> np.ndarray:
    # open intervals: a tone within ``tol`` of an edge sits on it and is
    # excluded, so rounding in f_s + n f_m cannot split a symmetric tone pair
    if band.shape is Shape.LOW_PASS:
        # (-f_u, 0) and (0, f_u) together with DC
        return (freqs > -band.f_u + tol) & (freqs < band.f_u - tol)
    pos = (freqs > band.f_l + tol) & (freqs < band.f_u - tol)
    neg = (freqs > -band.f_u + tol) & (freqs < -band.f_l - tol)
    return pos | neg


def filtered_power_fraction(plan: TonePlan, band: PassbandSpec) -> float:
    """``sum 2|a_n|^2`` over tones ``f_s + n f_m`` falling in the pass band."""
    n = np.arange(-plan.harmonic_range, plan.harmonic_range + 1)
    freqs = plan.f_s + n * plan.f_m
    mask = _in_band_mask(freqs, band, EDGE_TOLERANCE * plan.f_m)
    _check_tail(plan, band)
    return float(np.sum(2 * square_wave_power(n[mask])))


def _check_tail(plan: TonePlan, band: PassbandSpec) -> None:
    # In-band tones beyond the harmonic range are dropped; bound their power.
    big_n = plan.harmonic_range
    if band.shape is Shape.LOW_PASS:
        edges = [(-band.f_u, band.f_u)]
    else:
        edges = [(band.f_l, band.f_u), (-band.f_u, -band.f_l)]
    tail = 0.0
    for lo, hi in edges:
        n_lo = (lo - plan.f_s) / plan.f_m
        n_hi = (hi - plan.f_s) / plan.f_m
        # |n| restricted to (N, inf) on either side of zero
        for a, b in ((max(n_lo, big_n), n_hi), (max(-n_hi, big_n), -n_lo)):
            if b > a:
                # sum over odd n in [a, b] of 2/(pi n)^2 ~ (1/a - 1/b)/pi^2
                tail += (1.0 / max(a, 1.0) - 1.0 / b) / math.pi ** 2
    if tail > TAIL_TOLERANCE:
        warnings.warn(
            f"harmonic_range={plan.harmonic_range} drops up to {tail:.2e} of the in-band "
            "tone power; raise harmonic_range for a tighter estimate",
            RuntimeWarning,
            stacklevel=3,
        )


def il_filtering(plan: TonePlan, band: PassbandSpec) -> float:
    """Insertion loss (dB) from intra-modulated tones rejected by the delay line.

    Returns :data:`SATURATED_DB` when no tone lands in the band.
    """
    frac = filtered_power_fraction(plan, band)
    if frac <= 0:
        return SATURATED_DB
    return -10.0 * math.log10(frac)


def il_curve(
    plan: TonePlan,
    shape,
    normalized_bw_grid: Sequence[float],
    carrier_position: float = 0.5,
) -> List[Tuple[float, float]]:
    """Insertion loss against the normalised line bandwidth ``BW / f_m``.

    For a band-pass line the band is centred on ``plan.f_s`` (taken as the
    pass-band centre, assumed far above ``f_m``) and the carrier sits at
    ``f_l + carrier_position * BW``.  For a low-pass line the band is
    ``(0, BW)`` and the carrier sits at ``carrier_position * BW``.
    """
    shape = Shape(shape)
    grid = np.asarray(normalized_bw_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("normalized_bw_grid is empty")
    if np.any(np.diff(grid) < 0):
        raise ValueError("normalized_bw_grid must be ascending")
    if not (0 <= carrier_position <= 1):
        raise ValueError("carrier_position must lie in [0, 1]")
    out = []
    for x in grid:
        bw = x * plan.f_m
        if bw <= 0:
            out.append((float(x), SATURATED_DB))
            continue
        if shape is Shape.BAND_PASS:
            f_l = plan.f_s - bw / 2
            band = PassbandSpec(shape, f_l, f_l + bw)
            f_s = f_l + carrier_position * bw
        else:
            band = PassbandSpec.lowpass(bw)
            f_s = carrier_position * bw
        if f_s <= 0:
            out.append((float(x), SATURATED_DB))
            continue
        sub = TonePlan(f_s, plan.f_m, plan.harmonic_range)
        out.append((float(x), il_filtering(sub, band)))
    return out


def _check_dd(dd_ratio: float) -> None:
    if not (0 <= dd_ratio < 1):
        raise ValueError(f"dd_ratio must lie in [0, 1), got {dd_ratio!r}")


def deviation_il(dd_ratio: float) -> float:
    """Through-path loss caused by a normalised delay deviation ``|dd|/2delta``."""
    _check_dd(dd_ratio)
    return to_db(1.0 - dd_ratio)


def deviation_isolation(dd_ratio: float) -> float:
    _check_dd(dd_ratio)
    return to_db(dd_ratio)


def modulated_tone_level(port, n: int, dd_ratio: float) -> float:
    """Level (dBc) of the n-th tone on the ``2 f_m`` comb, relative to that port's carrier."""
    port = Port(port)
    if n == 0:
        raise ValueError("n = 0 is the main tone")
    _check_dd(dd_ratio)
    if port is Port.ISOLATED and dd_ratio == 0:
        raise ValueError("the isolated port carries no main tone at dd_ratio = 0")
    width = 1.0 - dd_ratio if port is Port.THROUGH else dd_ratio
    if width * n == int(width * n) and width * n != 0:
        return -SATURATED_DB
    return _level_db(abs(float(np.sinc(n * width))))


def switch_time_effects(ts_ratio: float, n_tones: int = 5) -> Dict[str, object]:
    """Through-path degradation from a finite switch time ``t_s / 2delta``.

    Each line passes ``[t_s, 2delta)`` out of every ``4delta``; the two lines
    add on the ``2 f_m`` comb, so the carrier amplitude is ``1 - ts_ratio``
    and the n-th tone sits at ``sinc(n (1 - ts_ratio))`` relative to it.  The
    input collected during the switching windows is reflected, which sets the
    return loss.  No signal reaches the isolated port.
    """
    if not (0 <= ts_ratio < 1):
        raise ValueError(f"ts_ratio must lie in [0, 1), got {ts_ratio!r}")
    width = 1.0 - ts_ratio
    tones = {}
    for n in range(1, n_tones + 1):
        if ts_ratio == 0:
            tones[n] = -SATURATED_DB
        else:
            tones[n] = _level_db(abs(float(np.sinc(n * width))))
    return {
        "il": to_db(width),
        "return_loss": to_db(ts_ratio),
        "isolation": SATURATED_DB,
        "tone_levels": tones,
    }


def ideal_smatrix(f: float, delta: float) -> np.ndarray:
    """Ideal 4-port circulation 1 -> 2 -> 3 -> 4 -> 1 with delay ``delta``."""
    if f < 0:
        raise ValueError("f must be non-negative")
    if delta <= 0:
        raise ValueError("delta must be positive")
    phase = np.exp(-2j * np.pi * f * delta)
    s = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        s[(j + 1) % 4, j] = phase
    return s
