"""Flat ``key = value`` run configuration with dotted keys.

Unknown keys are rejected.  An empty file yields the default system: 285 ns
band-pass lines with 4 dB loss over 150-160 MHz, 3 ohm / 60 kohm / 6 ns
switches, 50 ohm ports and a 3.2 GHz simulation rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .components import DelayLineModel, MatchingNetwork, Ramp, SwitchModel, Variant
from .engine import CirculatorConfig

__all__ = ["ConfigError", "RunConfig", "parse_config", "parse_text", "parse_formats", "KEYS"]


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _ints(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())


def parse_formats(text: str) -> Tuple[str, ...]:
    out = tuple(v.strip().lower() for v in text.split(",") if v.strip())
    bad = [v for v in out if v not in ("csv", "svg")]
    if bad or not out:
        raise ValueError(f"formats must be a subset of csv,svg; got {text!r}")
    return out


# key -> (parser, default); None defaults are derived from other keys
KEYS: Dict[str, Tuple[Callable[[str], Any], Any]] = {
    "delta_s": (float, 285e-9),
    "f_mod_hz": (float, None),
    "control_phases_s": (_floats, None),
    "z0_ohm": (float, 50.0),
    "sample_rate_hz": (float, 3.2e9),
    "shunt_switches": (_bool, True),
    "static": (_bool, False),
    "discard_periods": (int, 10),
    "analysis_periods": (int, 32),
    "switch.r_on_ohm": (float, 3.0),
    "switch.r_off_ohm": (float, 60e3),
    "switch.t_switch_s": (float, None),
    "switch.ramp": (str, "linear"),
    "delay_line.variant": (str, "bandpass"),
    "delay_line.f_l_hz": (float, 150e6),
    "delay_line.f_u_hz": (float, 160e6),
    "delay_line.group_delay_s": (float, None),
    "delay_line.passband_il_db": (float, 4.0),
    "delay_line.skirt_hz": (float, None),
    "delay_line.echo_db": (float, None),
    "delay_line.s2p_path": (str, None),
    "matching.enabled": (_bool, False),
    "matching.l_h": (float, 280e-9),
    "matching.c_f": (float, 2.73e-12),
    "sweep.f_start_hz": (float, 138e6),
    "sweep.f_stop_hz": (float, 174e6),
    "sweep.f_step_hz": (float, 0.5e6),
    "sweep.power_dbm": (float, -10.0),
    "sweep.source_ports": (_ints, (1,)),
    "sweep.dd_ratios": (_floats, None),
    "sweep.ts_ratios": (_floats, None),
    "sweep.bw_max": (float, 40.0),
    "sweep.bw_step": (float, 0.05),
    "sweep.carrier_positions": (_floats, (0.5, 0.25, 0.05)),
    "sweep.harmonic_range": (int, 1000),
    "sweep.n_tones": (int, 3),
    "spectrum.f_s_hz": (float, 155e6),
    "spectrum.source_port": (int, 1),
    "spectrum.observe_port": (int, 2),
    "spectrum.n_tones": (int, 10),
    "bounce.source_port": (int, 1),
    "bounce.pulse_width_s": (float, None),
    "bounce.n_periods": (int, 2),
    "bounce.pulse_period_s": (float, None),
    "bounce.n_pulses": (int, 1),
    "bounce.dead_time_s": (float, 0.0),
    "analytic.f_s_hz": (float, 155e6),
    "output.dir": (str, None),
    "output.formats": (parse_formats, ("csv",)),
}

DEFAULT_DD = tuple(np.round(np.arange(0.0, 0.951, 0.05), 10))
DEFAULT_TS = tuple(np.round(np.arange(0.0, 0.501, 0.02), 10))


@dataclass(frozen=True)
class RunConfig:
    circulator: CirculatorConfig
    values: Dict[str, Any] = field(repr=False)
    explicit: Tuple[str, ...] = ()
    source: Optional[Path] = None

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def frequency_grid(self) -> List[float]:
        from .engine import snap_frequency

        lo, hi, step = self["sweep.f_start_hz"], self["sweep.f_stop_hz"], self["sweep.f_step_hz"]
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        grid = sorted({snap_frequency(self.circulator, lo + k * step) for k in range(n)})
        return [f for f in grid if f > 0]

    @property
    def formats(self) -> Tuple[str, ...]:
        return self["output.formats"]


def _read_pairs(text: str, origin: str) -> Dict[str, str]:
    pairs: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("", f"{origin}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(key, f"unknown key ({origin}:{lineno})")
        if key in pairs:
            raise ConfigError(key, f"set twice ({origin}:{lineno})")
        pairs[key] = value
    return pairs


def _check(key: str, ok: bool, message: str) -> None:
    if not ok:
        raise ConfigError(key, message)


def _delay_line(v: Dict[str, Any], base: Optional[Path]) -> DelayLineModel:
    group_delay = v["delay_line.group_delay_s"] or v["delta_s"]
    path = v["delay_line.s2p_path"]
    if path is not None:
        p = Path(path)
        if not p.is_absolute() and base is not None:
            p = base / p
        _check("delay_line.s2p_path", p.is_file(), f"file not found: {p}")
        try:
            dl = DelayLineModel.from_touchstone(p, group_delay)
        except ValueError as exc:
            raise ConfigError("delay_line.s2p_path", str(exc)) from None
        if v["delay_line.skirt_hz"] is not None:
            from dataclasses import replace

            dl = replace(dl, skirt=v["delay_line.skirt_hz"])
        return dl
    try:
        variant = Variant(v["delay_line.variant"])
    except ValueError:
        raise ConfigError("delay_line.variant", "expected bandpass, lowpass or sampled") from None
    _check("delay_line.variant", variant is not Variant.SAMPLED, "a sampled line needs delay_line.s2p_path")
    f_l = 0.0 if variant is Variant.LOW_PASS else v["delay_line.f_l_hz"]
    try:
        return DelayLineModel(
            variant,
            f_l,
            v["delay_line.f_u_hz"],
            group_delay,
            passband_il=v["delay_line.passband_il_db"],
            skirt=v["delay_line.skirt_hz"],
            echo_db=v["delay_line.echo_db"],
        )
    except ValueError as exc:
        raise ConfigError("delay_line", str(exc)) from None


def _switch(v: Dict[str, Any]) -> SwitchModel:
    try:
        ramp = Ramp(v["switch.ramp"])
    except ValueError:
        raise ConfigError("switch.ramp", "expected instant or linear") from None
    t_sw = v["switch.t_switch_s"]
    if t_sw is None:
        t_sw = 0.0 if ramp is Ramp.INSTANT else 6e-9
    try:
        return SwitchModel(v["switch.r_on_ohm"], v["switch.r_off_ohm"], t_sw, ramp)
    except ValueError as exc:
        raise ConfigError("switch", str(exc)) from None


def _validate_sweeps(v: Dict[str, Any]) -> None:
    for key in ("sweep.dd_ratios", "sweep.ts_ratios"):
        vals = v[key]
        _check(key, len(vals) > 0, "grid is empty")
        _check(key, all(0 <= x < 1 for x in vals), "ratios must lie in [0, 1)")
    _check("sweep.f_step_hz", v["sweep.f_step_hz"] > 0, "must be positive")
    _check("sweep.f_stop_hz", v["sweep.f_stop_hz"] >= v["sweep.f_start_hz"], "must be >= sweep.f_start_hz")
    _check("sweep.bw_step", v["sweep.bw_step"] > 0, "must be positive")
    _check("sweep.bw_max", v["sweep.bw_max"] > 0, "must be positive")
    _check("sweep.carrier_positions", len(v["sweep.carrier_positions"]) > 0, "grid is empty")
    _check("sweep.carrier_positions", all(0 <= c <= 1 for c in v["sweep.carrier_positions"]),
           "positions must lie in [0, 1]")
    _check("sweep.source_ports", len(v["sweep.source_ports"]) > 0
           and all(p in (1, 2, 3, 4) for p in v["sweep.source_ports"]), "ports must be 1..4")
    for key in ("spectrum.source_port", "spectrum.observe_port", "bounce.source_port"):
        _check(key, v[key] in (1, 2, 3, 4), "port must be 1..4")
    _check("sweep.harmonic_range", v["sweep.harmonic_range"] >= 1, "must be >= 1")
    _check("sweep.n_tones", v["sweep.n_tones"] >= 1, "must be >= 1")
    _check("spectrum.n_tones", v["spectrum.n_tones"] >= 1, "must be >= 1")
    _check("spectrum.f_s_hz", v["spectrum.f_s_hz"] > 0, "must be positive")
    _check("analytic.f_s_hz", v["analytic.f_s_hz"] > 0, "must be positive")


def parse_text(text: str, origin: str = "<config>", base_dir: Optional[Path] = None) -> RunConfig:
    raw = _read_pairs(text, origin)
    values: Dict[str, Any] = {}
    for key, (parser, default) in KEYS.items():
        if key in raw:
            try:
                values[key] = parser(raw[key])
            except ValueError as exc:
                raise ConfigError(key, f"bad value {raw[key]!r} ({exc})") from None
        else:
            values[key] = default
    if values["sweep.dd_ratios"] is None:
        values["sweep.dd_ratios"] = DEFAULT_DD
    if values["sweep.ts_ratios"] is None:
        values["sweep.ts_ratios"] = DEFAULT_TS
    _validate_sweeps(values)

    delta = values["delta_s"]
    _check("delta_s", math.isfinite(delta) and delta > 0, "must be a positive time")
    phases = values["control_phases_s"]
    if phases is not None:
        _check("control_phases_s", len(phases) == 4, "expected four offsets (L1, R1, L2, R2)")
    matching = None
    if values["matching.enabled"]:
        try:
            matching = MatchingNetwork(values["matching.l_h"], values["matching.c_f"])
        except ValueError as exc:
            raise ConfigError("matching", str(exc)) from None
    line = _delay_line(values, base_dir)
    switch = _switch(values)
    try:
        circ = CirculatorConfig(
            delta=delta,
            f_mod=values["f_mod_hz"],
            control_phases=phases,
            delay_line_a=line,
            switch=switch,
            shunt_switches=values["shunt_switches"],
            z0=values["z0_ohm"],
            sample_rate=values["sample_rate_hz"],
            matching=matching,
            discard_periods=values["discard_periods"],
            analysis_periods=values["analysis_periods"],
            static=values["static"],
        )
    except ValueError as exc:
        raise ConfigError("circulator", str(exc)) from None
    values["f_mod_hz"] = circ.modulation_frequency
    return RunConfig(circ, values, tuple(sorted(raw)), None)


def parse_config(path) -> RunConfig:
    """Read and validate a config file; ``None`` gives the defaults."""
    if path is None:
        return parse_text("")
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read {p}: {exc.strerror}") from None
    cfg = parse_text(text, str(p), p.parent)
    return RunConfig(cfg.circulator, cfg.values, cfg.explicit, p)
