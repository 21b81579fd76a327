"""Time-domain simulation of the 4-port switched delay-line circulator.

Ports 1 and 3 sit on the left end of delay lines A and B, ports 2 and 4 on the
right end.  Every port reaches each line through one series switch (optionally
with a complementary shunt-to-ground switch at its midpoint).  Between delay
lines the network is purely resistive, so at every sample the waves entering
the lines and leaving the ports are a linear, periodically varying map of the
waves emerging from the lines and of the sources.  That map is solved once
per sample phase of the modulation period; the lines are FIR kernels on wave
variables, which lets whole blocks of samples (shorter than the smallest
kernel lag) be advanced at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import fftconvolve

from .components import (
    DelayLineModel,
    MatchingNetwork,
    Ramp,
    SwitchModel,
    Variant,
    impulse_response,
    reference_delay_line,
    reference_switch,
)

__all__ = [
    "SimulationError",
    "CirculatorConfig",
    "SimulationResult",
    "Tone",
    "ToneSpectrum",
    "simulate_tone",
    "extract_sparams",
    "extract_spectrum",
    "group_delay",
    "snap_frequency",
    "switch_module_testbench",
    "sparam_summary",
    "ideal_config",
    "reference_config",
    "deviation_config",
    "dbm_to_amplitude",
]

GROWTH_LIMIT_DB = 0.1
# precursor energy dropped ahead of a kernel's first tap (sets the block length)
LEADING_ENERGY = 1e-6
TRAILING_ENERGY = 1e-12
LADDER = ("L1", "R1", "L2", "R2")

# (port index, line end index, control name); line ends: A-left, A-right, B-left, B-right
CIRCULATOR_BRANCHES = (
    (0, 0, "L1"),
    (0, 2, "L2"),
    (2, 0, "L2"),
    (2, 2, "L1"),
    (1, 1, "R1"),
    (1, 3, "R2"),
    (3, 1, "R2"),
    (3, 3, "R1"),
)


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class CirculatorConfig:
    delta: float = 285e-9
    f_mod: Optional[float] = None
    control_phases: Optional[Tuple[float, float, float, float]] = None
    delay_line_a: DelayLineModel = field(default_factory=reference_delay_line)
    delay_line_b: Optional[DelayLineModel] = None
    switch: SwitchModel = field(default_factory=reference_switch)
    shunt_switches: bool = True
    z0: float = 50.0
    sample_rate: float = 3.2e9
    matching: Optional[MatchingNetwork] = None
    discard_periods: int = 10
    analysis_periods: int = 32
    n_taps: Optional[int] = None
    static: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.z0 > 0:
            raise ValueError("z0 must be positive")
        if self.f_mod is not None and not self.f_mod > 0:
            raise ValueError("f_mod must be positive")
        if self.discard_periods < 0 or self.analysis_periods < 1:
            raise ValueError("need discard_periods >= 0 and analysis_periods >= 1")
        for line in self.lines:
            if line.variant is not Variant.SAMPLED and math.isfinite(line.f_u):
                edge = line.f_u + line.skirt_width
                if self.sample_rate < 20 * line.f_u:
                    raise ValueError(
                        f"sample_rate {self.sample_rate:g} Hz is below 20 * f_u = {20 * line.f_u:g} Hz"
                    )
                if edge >= self.sample_rate / 2:
                    raise ValueError("line response extends past Nyquist")
        _ = self.samples_per_period

    @property
    def lines(self) -> Tuple[DelayLineModel, DelayLineModel]:
        return (self.delay_line_a, self.delay_line_b or self.delay_line_a)

    @property
    def modulation_frequency(self) -> float:
        return self.f_mod if self.f_mod is not None else 1.0 / (4 * self.delta)

    @property
    def period(self) -> float:
        return 1.0 / self.modulation_frequency

    @property
    def samples_per_period(self) -> int:
        m = self.sample_rate * self.period
        m_int = int(round(m))
        if abs(m - m_int) > 1e-6 * m:
            raise ValueError(
                f"sample_rate / f_mod = {m!r} is not an integer (commensurate grid required)"
            )
        return m_int

    @property
    def phases(self) -> Dict[str, float]:
        if self.control_phases is None:
            q = self.period / 4
            return {name: k * q for k, name in enumerate(LADDER)}
        return dict(zip(LADDER, self.control_phases))

    @property
    def total_periods(self) -> int:
        return self.discard_periods + self.analysis_periods

    @property
    def window_samples(self) -> int:
        return self.analysis_periods * self.samples_per_period

    @property
    def tap_count(self) -> int:
        if self.n_taps is not None:
            return self.n_taps
        longest = max(line.group_delay for line in self.lines)
        factor = 6 if any(line.echo_db is not None for line in self.lines) else 4
        return max(1, int(math.ceil(factor * longest * self.sample_rate)) + 1)


def ideal_config(
    delta: float = 250e-9,
    sample_rate: float = 1e9,
    line_delay: Optional[float] = None,
    **kw,
) -> CirculatorConfig:
    """Instant near-ideal switches with lossless all-pass delay lines."""
    line = DelayLineModel.all_pass(delta if line_delay is None else line_delay)
    kw.setdefault("shunt_switches", False)
    return CirculatorConfig(
        delta=delta,
        delay_line_a=line,
        switch=SwitchModel.ideal(),
        sample_rate=sample_rate,
        **kw,
    )


def reference_config(**kw) -> CirculatorConfig:
    """Band-pass 4 dB / 10 MHz / 285 ns lines with 3 ohm / 60 kohm / 6 ns switches."""
    return CirculatorConfig(**kw)


def deviation_config(
    dd_ratio: float, delta: float = 250e-9, sample_rate: float = 1e9, longer: bool = True, **kw
) -> CirculatorConfig:
    """Ideal config whose lines miss the quarter period by ``dd_ratio * 2 delta``.

    The switching stays at ``1 / (4 delta)``; only the line delay moves, which
    is equivalent to detuning the modulation against a fixed line.
    """
    dd = dd_ratio * 2 * delta
    return ideal_config(delta, sample_rate, line_delay=delta + dd if longer else delta - dd, **kw)


def dbm_to_amplitude(power_dbm: float) -> float:
    return math.sqrt(10 ** (power_dbm / 10) / 1000)


# --------------------------------------------------------------------------- network


@dataclass(frozen=True)
class _Branch:
    port: int
    end: int  # line end index, or -1 - k for a second port k
    control: str


def _tau_samples(k: np.ndarray, start: float, period_samples: int, sample_rate: float) -> np.ndarray:
    x = k - start * sample_rate
    x_round = np.round(x)
    x = np.where(np.abs(x - x_round) < 1e-6, x_round, x)
    return np.mod(x, period_samples)


def _branch_resistance(sw: SwitchModel, control, phases, P, sample_rate, static, shunt=False):
    """Resistance of one series (or complementary shunt) switch at each sample phase."""
    if static:
        return np.full(P, sw.r_off if shunt else sw.r_on)
    start = phases[control] + (P / 2 / sample_rate if shunt else 0.0)
    tau = _tau_samples(np.arange(P, dtype=float), start, P, sample_rate)
    r = np.where(tau < P / 2, sw.r_on, sw.r_off).astype(float)
    if sw.t_switch > 0:
        ramp = sw.t_switch * sample_rate
        rising = tau < ramp
        r = np.where(rising, sw.r_off + (sw.r_on - sw.r_off) * tau / ramp, r)
        since_off = tau - P / 2
        falling = (since_off >= 0) & (since_off < ramp)
        r = np.where(falling, sw.r_on + (sw.r_off - sw.r_on) * since_off / ramp, r)
    return r


def _stamp(G, i, j, g):
    # conductance g (shape (P,)) between nodes i and j; j = None means ground
    G[:, i, i] += g
    if j is not None:
        G[:, j, j] += g
        G[:, i, j] -= g
        G[:, j, i] -= g


def _wave_map(
    n_ports: int,
    n_ends: int,
    branches: Sequence[_Branch],
    end_reflection: Sequence[float],
    switch: SwitchModel,
    phases: Dict[str, float],
    P: int,
    sample_rate: float,
    z0: float,
    shunt: bool,
    static: bool,
) -> np.ndarray:
    """Per-phase linear map ``[a_end; b_port] = M[k] @ [h_end; a_src]``."""
    n_mid = len(branches) if shunt else 0
    n_nodes = n_ports + n_ends + n_mid
    G = np.zeros((P, n_nodes, n_nodes))
    sq = math.sqrt(z0)
    g_end = np.asarray(end_reflection, dtype=float)
    for p in range(n_ports):
        G[:, p, p] += 1.0 / z0
    for e in range(n_ends):
        node = n_ports + e
        z_th = z0 * (1 + g_end[e]) / (1 - g_end[e])
        G[:, node, node] += 1.0 / z_th
    for b_idx, br in enumerate(branches):
        r = _branch_resistance(switch, br.control, phases, P, sample_rate, static)
        other = n_ports + br.end if br.end >= 0 else -1 - br.end
        if shunt:
            mid = n_ports + n_ends + b_idx
            _stamp(G, br.port, mid, 2.0 / r)
            _stamp(G, mid, other, 2.0 / r)
            r_sh = _branch_resistance(switch, br.control, phases, P, sample_rate, static, shunt=True)
            _stamp(G, mid, None, 1.0 / r_sh)
        else:
            _stamp(G, br.port, other, 1.0 / r)
    n_in = n_ends + n_ports
    B = np.zeros((n_nodes, n_in))
    for e in range(n_ends):
        B[n_ports + e, e] = 2.0 / (sq * (1 + g_end[e]))
    for p in range(n_ports):
        B[p, n_ends + p] = 2.0 / sq
    X = np.linalg.solve(G, np.broadcast_to(B, (P,) + B.shape))
    M = np.zeros((P, n_in, n_in))
    for e in range(n_ends):
        M[:, e, :] = X[:, n_ports + e, :] / (sq * (1 + g_end[e]))
        M[:, e, e] -= 1.0 / (1 + g_end[e])
    for p in range(n_ports):
        M[:, n_ends + p, :] = X[:, p, :] / sq
        M[:, n_ends + p, n_ends + p] -= 1.0
    return M


@dataclass(frozen=True)
class _Kernel:
    out_end: int
    in_end: int
    lag: int
    taps: np.ndarray


def _trim(taps: np.ndarray) -> Optional[Tuple[int, np.ndarray]]:
    energy = np.cumsum(taps ** 2)
    total = energy[-1] if energy.size else 0.0
    if total <= 0:
        return None
    k0 = int(np.searchsorted(energy, LEADING_ENERGY * total, side="right"))
    tail = np.cumsum((taps ** 2)[::-1])
    k1 = taps.size - int(np.searchsorted(tail, TRAILING_ENERGY * total, side="right"))
    k0 = min(k0, k1 - 1)
    return k0, taps[k0:k1].copy()


@dataclass(frozen=True)
class _Plant:
    M: np.ndarray
    kernels: Tuple[_Kernel, ...]
    n_ports: int
    n_ends: int
    block: int


@lru_cache(maxsize=16)
def _circulator_plant(cfg: CirculatorConfig) -> _Plant:
    P = cfg.samples_per_period
    kernels = []
    reflections = [0.0] * 4
    for li, line in enumerate(cfg.lines):
        k = impulse_response(line, cfg.sample_rate, cfg.tap_count, cfg.matching, cfg.z0)
        left, right = 2 * li, 2 * li + 1
        for name, out_end, in_end in (
            ("s21", right, left),
            ("s12", left, right),
            ("s11", left, left),
            ("s22", right, right),
        ):
            taps = k.get(name).copy()
            if out_end == in_end:
                reflections[out_end] = float(taps[0])
                taps[0] = 0.0
            trimmed = _trim(taps)
            if trimmed is not None:
                kernels.append(_Kernel(out_end, in_end, trimmed[0], trimmed[1]))
    branches = [_Branch(p, e, c) for p, e, c in CIRCULATOR_BRANCHES]
    M = _wave_map(
        4, 4, branches, reflections, cfg.switch, cfg.phases, P, cfg.sample_rate, cfg.z0,
        cfg.shunt_switches, cfg.static,
    )
    block = min([kn.lag for kn in kernels] + [P])
    if block < 1:
        raise SimulationError("a line kernel has zero latency; the wave loop cannot be advanced")
    return _Plant(M, tuple(kernels), 4, 4, block)


def _run(plant: _Plant, P: int, n_samples: int, sources: np.ndarray, sample_rate: float):
    """Advance the plant; ``sources`` has shape (n_ports, batch, n_samples)."""
    n_ends, n_ports = plant.n_ends, plant.n_ports
    batch = sources.shape[1]
    pad = max([kn.lag + kn.taps.size for kn in plant.kernels] + [0])
    hist = np.zeros((n_ends, batch, pad + n_samples), dtype=complex)
    out = np.zeros((n_ports, batch, n_samples), dtype=complex)
    B = plant.block
    u = np.zeros((n_ends + n_ports, batch, B), dtype=complex)
    for t0 in range(0, n_samples, B):
        t1 = min(n_samples, t0 + B)
        L = t1 - t0
        uu = u[:, :, :L]
        uu[:n_ends] = 0
        for kn in plant.kernels:
            lo = pad + t0 - kn.lag - (kn.taps.size - 1)
            seg = hist[kn.in_end, :, lo : pad + t1 - kn.lag]
            if kn.taps.size == 1:
                uu[kn.out_end] += kn.taps[0] * seg
            else:
                uu[kn.out_end] += fftconvolve(seg, kn.taps[None, :], mode="valid", axes=-1)
        uu[n_ends:] = sources[:, :, t0:t1]
        ph = np.arange(t0, t1) % P
        y = np.einsum("tij,jbt->ibt", plant.M[ph], uu)
        hist[:, :, pad + t0 : pad + t1] = y[:n_ends]
        out[:, :, t0:t1] = y[n_ends:]
    return hist[:, :, pad:], out


def _check_growth(window: np.ndarray) -> None:
    if not np.all(np.isfinite(window)):
        raise SimulationError("non-finite wave values: the simulation diverged")
    power = np.sum(np.abs(window) ** 2, axis=0)  # (batch, W)
    q = power.shape[-1] // 4
    first = power[..., :q].mean(axis=-1)
    last = power[..., -q:].mean(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = 10 * np.log10(np.where(first > 0, last / first, 1.0))
    if np.any(growth > GROWTH_LIMIT_DB):
        raise SimulationError(
            f"output power grew by {float(np.max(growth)):.3f} dB across the analysis window"
        )


def snap_frequency(cfg: CirculatorConfig, f: float) -> float:
    """Nearest frequency with an integer number of cycles in the analysis window."""
    step = cfg.sample_rate / cfg.window_samples
    return round(f / step) * step


def _check_commensurate(cfg: CirculatorConfig, f: float) -> None:
    cycles = f * cfg.window_samples / cfg.sample_rate
    if abs(cycles - round(cycles)) > 1e-6:
        raise ValueError(
            f"f_s = {f!r} Hz is not commensurate with the analysis window; use snap_frequency()"
        )


@dataclass(frozen=True)
class SimulationResult:
    """Wave time series (sqrt(W) units) at the ports and line ends.

    ``incident``/``reflected`` have shape (4, n_samples).  ``line_incident``
    holds the waves launched into A-left, A-right, B-left, B-right.
    """

    incident: np.ndarray
    reflected: np.ndarray
    line_incident: np.ndarray
    sample_rate: float
    f_s: float
    f_mod: float
    window_start: int
    source_port: int

    @property
    def n_samples(self) -> int:
        return self.reflected.shape[-1]

    @property
    def window(self) -> slice:
        return slice(self.window_start, self.n_samples)

    def node(self, name: str) -> np.ndarray:
        """Signals f_A..f_E for a port-1 excitation (input, lines A/B left, port 2, port 4)."""
        table = {
            "A": self.incident[0],
            "B": self.line_incident[0],
            "C": self.line_incident[2],
            "D": self.reflected[1],
            "E": self.reflected[3],
        }
        return table[name]

    def bin(self, port: int, f: float) -> complex:
        """Complex amplitude of the reflected wave at ``port`` (1-based) and ``f``."""
        b = self.reflected[port - 1, self.window]
        t = np.arange(self.window_start, self.n_samples) / self.sample_rate
        return complex(np.mean(b * np.exp(-2j * np.pi * f * t)))


def _sources(cfg, entries, n_samples, amplitude):
    t = np.arange(n_samples) / cfg.sample_rate
    src = np.zeros((4, len(entries), n_samples), dtype=complex)
    for b, (port, f) in enumerate(entries):
        src[port - 1, b] = amplitude * np.exp(2j * np.pi * f * t)
    return src


def simulate_tone(
    cfg: CirculatorConfig,
    source_port: int,
    f_s: float,
    amplitude: float = 1.0,
    n_periods: Optional[int] = None,
) -> SimulationResult:
    """Drive ``source_port`` with ``amplitude * exp(j 2 pi f_s t)`` and record all waves.

    A complex tone is used: the network is real and linear, so its response
    to the complex exponential is the analytic response at ``+f_s`` and no
    image tones fold onto the analysis bins.
    """
    if source_port not in (1, 2, 3, 4):
        raise ValueError("source_port must be 1..4")
    if n_periods is not None:
        if n_periods < 20:
            raise ValueError("n_periods must be >= 20 modulation periods")
        cfg = replace(cfg, analysis_periods=n_periods - cfg.discard_periods)
    _check_commensurate(cfg, f_s)
    plant = _circulator_plant(cfg)
    P = cfg.samples_per_period
    n = cfg.total_periods * P
    src = _sources(cfg, [(source_port, f_s)], n, amplitude)
    hist, out = _run(plant, P, n, src, cfg.sample_rate)
    start = cfg.discard_periods * P
    _check_growth(out[:, :, start:])
    return SimulationResult(
        incident=src[:, 0],
        reflected=out[:, 0],
        line_incident=hist[:, 0],
        sample_rate=cfg.sample_rate,
        f_s=f_s,
        f_mod=cfg.modulation_frequency,
        window_start=start,
        source_port=source_port,
    )


def _window_bins(cfg, out, freqs_per_entry, start):
    """DFT of each output at its requested frequencies: returns (n_ports, batch, k)."""
    W = out.shape[-1] - start
    t = np.arange(start, out.shape[-1]) / cfg.sample_rate
    win = out[:, :, start:]
    res = np.empty((out.shape[0], out.shape[1], freqs_per_entry.shape[1]), dtype=complex)
    for b in range(out.shape[1]):
        basis = np.exp(-2j * np.pi * np.outer(freqs_per_entry[b], t))  # (k, W)
        res[:, b, :] = win[:, b, :] @ basis.T / W
    return res


def extract_sparams(
    cfg: CirculatorConfig,
    f_grid: Sequence[float],
    power_dbm: float = -10.0,
    source_ports: Sequence[int] = (1, 2, 3, 4),
    chunk: int = 8,
) -> np.ndarray:
    """S(f) of shape (len(f_grid), 4, 4); columns of unexcited ports are NaN."""
    f_grid = [float(f) for f in f_grid]
    for f in f_grid:
        _check_commensurate(cfg, f)
    amp = dbm_to_amplitude(power_dbm)
    plant = _circulator_plant(cfg)
    P = cfg.samples_per_period
    n = cfg.total_periods * P
    start = cfg.discard_periods * P
    entries = [(p, fi, i) for i, f in enumerate(f_grid) for p in source_ports for fi in [f]]
    S = np.full((len(f_grid), 4, 4), np.nan, dtype=complex)
    for c0 in range(0, len(entries), chunk):
        part = entries[c0 : c0 + chunk]
        src = _sources(cfg, [(p, f) for p, f, _ in part], n, amp)
        _, out = _run(plant, P, n, src, cfg.sample_rate)
        _check_growth(out[:, :, start:])
        freqs = np.array([[f] for _, f, _ in part])
        bins = _window_bins(cfg, out, freqs, start)[:, :, 0]
        for b, (p, f, i) in enumerate(part):
            S[i, :, p - 1] = bins[:, b] / amp
    return S


@dataclass(frozen=True)
class Tone:
    frequency: float
    power_dbm: float
    order: int

    @property
    def tag(self) -> str:
        return "carrier" if self.order == 0 else f"im{self.order:+d}"


@dataclass(frozen=True)
class ToneSpectrum:
    tones: Tuple[Tone, ...]
    carrier_dbm: float
    f_s: float
    f_mod: float

    def level_dbc(self, order: int) -> float:
        for t in self.tones:
            if t.order == order:
                return t.power_dbm - self.carrier_dbm
        raise KeyError(order)

    def total_power_w(self) -> float:
        return float(sum(10 ** (t.power_dbm / 10) / 1000 for t in self.tones))


def _dbm(amplitude: complex) -> float:
    p = abs(amplitude) ** 2 * 1000
    return 10 * math.log10(p) if p > 0 else -300.0


def extract_spectrum(
    cfg: CirculatorConfig,
    source_port: int,
    f_s: float,
    observe_port: int,
    n_tones: int = 10,
    power_dbm: float = -10.0,
    result: Optional[SimulationResult] = None,
) -> ToneSpectrum:
    """Tones at ``f_s + n f_mod`` (|n| <= n_tones) leaving ``observe_port``."""
    if result is None:
        result = simulate_tone(cfg, source_port, f_s, dbm_to_amplitude(power_dbm))
    tones = []
    for n in range(-n_tones, n_tones + 1):
        f = f_s + n * result.f_mod
        tones.append(Tone(f, _dbm(result.bin(observe_port, f)), n))
    carrier = next(t.power_dbm for t in tones if t.order == 0)
    return ToneSpectrum(tuple(tones), carrier, f_s, result.f_mod)


def group_delay(s_curve: Sequence[complex], f_grid: Sequence[float]) -> np.ndarray:
    """``-d(phase)/d(omega)`` by central differences of the unwrapped phase."""
    s = np.asarray(s_curve, dtype=complex)
    f = np.asarray(f_grid, dtype=float)
    if s.shape != f.shape or f.size < 3:
        raise ValueError("need matching S and frequency arrays with >= 3 points")
    if np.any(np.diff(f) <= 0):
        raise ValueError("frequency grid must be strictly ascending")
    jumps = np.abs(np.angle(s[1:] / s[:-1]))
    if np.any(jumps > 0.9 * math.pi):
        raise ValueError("phase step between grid points too close to pi: unwrapping is ambiguous")
    phase = np.unwrap(np.angle(s))
    return -np.gradient(phase, 2 * np.pi * f)


# --------------------------------------------------------------------------- testbench


@lru_cache(maxsize=16)
def _testbench_plant(switch: SwitchModel, P: int, sample_rate: float, z0: float, shunt: bool):
    phases = {"L1": 0.0}
    M = _wave_map(2, 0, [_Branch(0, -2, "L1")], [], switch, phases, P, sample_rate, z0, shunt, False)
    return _Plant(M, (), 2, 0, P)


def switch_module_testbench(
    switch: SwitchModel,
    f_mod: float,
    f_s: float,
    sample_rate: float,
    periods: int = 8,
    shunt: bool = False,
    z0: float = 50.0,
) -> float:
    """Carrier transmission loss (dB) through one square-wave gated switch.

    Two matched ports joined by a single switch driven at ``f_mod`` with 50 %
    duty, i.e. one line path of a switch module with the other ports loaded.
    """
    P_float = sample_rate / f_mod
    P = int(round(P_float))
    if abs(P - P_float) > 1e-6 * P_float:
        raise ValueError("sample_rate / f_mod must be an integer")
    n = periods * P
    cycles = f_s * n / sample_rate
    if abs(cycles - round(cycles)) > 1e-6:
        raise ValueError("f_s must complete an integer number of cycles in the window")
    plant = _testbench_plant(switch, P, sample_rate, z0, shunt)
    t = np.arange(n) / sample_rate
    src = np.zeros((2, 1, n), dtype=complex)
    src[0, 0] = np.exp(2j * np.pi * f_s * t)
    _, out = _run(plant, P, n, src, sample_rate)
    b2 = complex(np.mean(out[1, 0] * np.exp(-2j * np.pi * f_s * t)))
    return -20 * math.log10(abs(b2))


# --------------------------------------------------------------------------- metrics


def _db(x):
    with np.errstate(divide="ignore"):
        return 20 * np.log10(np.abs(x))


def sparam_summary(f_grid: Sequence[float], S: np.ndarray) -> Dict[str, float]:
    """Headline numbers for a port-1 sweep.

    The through path is S21; isolation is the weaker of S31 and S41.  The
    bandwidth is the contiguous 3 dB insertion-loss band around the best IL,
    and ``isolation_in_band`` is the worst isolation inside it.
    """
    f = np.asarray(f_grid, dtype=float)
    il = -_db(S[:, 1, 0])
    iso = np.minimum(-_db(S[:, 2, 0]), -_db(S[:, 3, 0]))
    best = int(np.argmin(il))
    inside = il <= il[best] + 3.0
    lo = best
    while lo > 0 and inside[lo - 1]:
        lo -= 1
    hi = best
    while hi < f.size - 1 and inside[hi + 1]:
        hi += 1

    def edge(i_in, i_out):
        # linear interpolation of the 3 dB crossing between two grid points
        if i_out < 0 or i_out >= f.size:
            return f[i_in]
        target = il[best] + 3.0
        x0, x1, y0, y1 = f[i_in], f[i_out], il[i_in], il[i_out]
        return x0 + (target - y0) * (x1 - x0) / (y1 - y0)

    f_lo, f_hi = edge(lo, lo - 1), edge(hi, hi + 1)
    return {
        "min_il_db": float(il[best]),
        "f_min_il_hz": float(f[best]),
        "bandwidth_hz": float(f_hi - f_lo),
        "center_hz": float((f_hi + f_lo) / 2),
        "isolation_in_band_db": float(np.min(iso[lo : hi + 1])),
        "isolation_at_best_db": float(iso[best]),
        "reverse_isolation_at_best_db": float(-_db(S[best, 0, 1])) if np.isfinite(S[best, 0, 1]) else float("nan"),
    }
