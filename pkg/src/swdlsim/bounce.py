"""Event-based bounce diagrams for the switched delay-line circulator.

A pulse is followed through the network with ideal switch semantics: an on
switch passes the wave unchanged, and a line end (or port) with every switch
off reflects it with unit amplitude.  Lines add only their group delay and
flat pass-band loss.  Pieces of a pulse that straddle a switching edge are
split at the edge, and contiguous pieces with identical history are merged
again, so a continuous train produces one segment per switching window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .components import Ramp
from .engine import CIRCULATOR_BRANCHES, CirculatorConfig

__all__ = ["Segment", "BounceTrace", "bounce_trace"]

FORWARD = "forward"
BACKWARD = "backward"
DELIVERED = "delivered"
REFLECTED = "reflected"
ABSORBED = "absorbed"

LINE_NAMES = ("A", "B")
# line end -> (line index, side); left ends launch forward
_END_LINE = {0: (0, "left"), 1: (0, "right"), 2: (1, "left"), 3: (1, "right")}
_FAR_END = {0: 1, 1: 0, 2: 3, 3: 2}


@dataclass(frozen=True)
class Segment:
    """One pass of a pulse piece along a line.

    ``t_start`` is when its leading edge leaves one end and ``t_end`` when it
    reaches the other; ``width`` is its duration.  ``port`` is the 1-based
    port for ``fate == "delivered"``.  ``absorbed`` marks pieces still in
    flight when the trace window closes.
    """

    line: str
    direction: str
    t_start: float
    t_end: float
    width: float
    amplitude: float
    origin_port: int
    fate: str
    port: Optional[int] = None

    def as_row(self) -> Tuple:
        return (self.line, self.direction, self.t_start, self.t_end, self.width,
                self.amplitude, self.origin_port, self.fate, self.port or 0)


@dataclass(frozen=True)
class BounceTrace:
    segments: Tuple[Segment, ...]
    # (port, t_start, width, amplitude) of input that found every switch off
    source_reflections: Tuple[Tuple[int, float, float, float], ...]
    delta: float
    horizon: float

    def delivered(self, port: int) -> List[Segment]:
        return [s for s in self.segments if s.fate == DELIVERED and s.port == port]

    def delivered_time(self, port: int) -> float:
        """Total pulse duration handed to ``port``."""
        return float(sum(s.width for s in self.delivered(port)))


def _check_traceable(cfg: CirculatorConfig, dead_time: float) -> None:
    if cfg.switch.ramp is not Ramp.INSTANT:
        raise ValueError("bounce tracing needs instant switches (linear ramps are not event based)")
    if cfg.static:
        raise ValueError("bounce tracing needs modulated switches")
    if not (0 <= dead_time < cfg.period / 2):
        raise ValueError("dead_time must lie in [0, period/2)")
    # each port and each line end may have at most one switch on at a time
    half = cfg.period / 2
    for key in (0, 1):
        groups = {}
        for br in CIRCULATOR_BRANCHES:
            groups.setdefault(br[key], []).append(cfg.phases[br[2]])
        for starts in groups.values():
            for i in range(len(starts)):
                for j in range(i + 1, len(starts)):
                    gap = (starts[j] - starts[i]) % cfg.period
                    if min(gap, cfg.period - gap) < half - dead_time - 1e-12 * cfg.period:
                        raise ValueError("control phases overlap: two switches on the same node conduct together")


class _Gates:
    def __init__(self, cfg: CirculatorConfig, dead_time: float):
        self.period = cfg.period
        self.half = cfg.period / 2
        self.dead = dead_time
        self.phases = cfg.phases

    def is_on(self, control: str, t: float) -> bool:
        tau = (t - self.phases[control]) % self.period
        return self.dead <= tau < self.half

    def edges(self, t0: float, t1: float) -> List[float]:
        """Switching instants strictly inside (t0, t1)."""
        out = set()
        for s in self.phases.values():
            for off in (0.0, self.dead, self.half):
                base = s + off
                k = math.floor((t0 - base) / self.period)
                t = base + k * self.period
                while t < t1:
                    if t > t0:
                        out.add(t)
                    t += self.period
        return sorted(out)


def _split(gates: _Gates, t0: float, width: float) -> List[Tuple[float, float]]:
    cuts = [t0] + gates.edges(t0, t0 + width) + [t0 + width]
    return [(a, b - a) for a, b in zip(cuts[:-1], cuts[1:]) if b - a > 0]


def _route_from_port(port: int, t_mid: float, gates: _Gates) -> Optional[int]:
    for p, end, ctrl in CIRCULATOR_BRANCHES:
        if p == port and gates.is_on(ctrl, t_mid):
            return end
    return None


def _route_from_end(end: int, t_mid: float, gates: _Gates) -> Optional[int]:
    for p, e, ctrl in CIRCULATOR_BRANCHES:
        if e == end and gates.is_on(ctrl, t_mid):
            return p
    return None


def _merge(segments: List[Segment], tol: float) -> List[Segment]:
    groups = {}
    for s in segments:
        ident = (s.line, s.direction, s.origin_port, s.fate, s.port, round((s.t_end - s.t_start) / tol))
        groups.setdefault(ident, []).append(s)
    out: List[Segment] = []
    for run in groups.values():
        run.sort(key=lambda s: s.t_start)
        cur = run[0]
        for s in run[1:]:
            touching = abs(cur.t_start + cur.width - s.t_start) <= tol
            if touching and abs(cur.amplitude - s.amplitude) <= 1e-12 * max(1.0, cur.amplitude):
                cur = Segment(cur.line, cur.direction, cur.t_start, cur.t_end, cur.width + s.width,
                              cur.amplitude, cur.origin_port, cur.fate, cur.port)
            else:
                out.append(cur)
                cur = s
        out.append(cur)
    return sorted(out, key=lambda s: (s.t_start, s.line, s.direction))


def bounce_trace(
    cfg: CirculatorConfig,
    source_port: int = 1,
    pulse_width: Optional[float] = None,
    n_periods: int = 2,
    pulse_period: Optional[float] = None,
    n_pulses: int = 1,
    dead_time: float = 0.0,
    start: float = 0.0,
    amplitude: float = 1.0,
) -> BounceTrace:
    """Trace rectangular pulses launched into ``source_port``.

    ``pulse_period`` and ``n_pulses`` build a pulse train; a period equal to
    ``pulse_width`` gives a continuous wave.  ``dead_time`` delays every
    switch turn-on (the event-based picture of a finite switch time).  The
    trace stops at ``start + n_periods`` modulation periods.
    """
    if source_port not in (1, 2, 3, 4):
        raise ValueError("source_port must be 1..4")
    _check_traceable(cfg, dead_time)
    delta = cfg.delta
    if pulse_width is None:
        pulse_width = delta / 8
    if not (0 < pulse_width <= delta / 4):
        raise ValueError("pulse_width must lie in (0, delta/4]")
    if n_periods < 1 or n_pulses < 1:
        raise ValueError("need n_periods >= 1 and n_pulses >= 1")
    if n_pulses > 1 and (pulse_period is None or pulse_period < pulse_width):
        raise ValueError("a pulse train needs pulse_period >= pulse_width")

    gates = _Gates(cfg, dead_time)
    horizon = start + n_periods * cfg.period
    delays = [line.group_delay for line in cfg.lines]
    gains = [10 ** (-line.passband_il / 20) for line in cfg.lines]
    tol = 1e-9 * delta
    segments: List[Segment] = []
    reflections = []

    # pending pieces entering a line: (end, t_launch, width, amplitude)
    pending: List[Tuple[int, float, float, float]] = []
    for k in range(n_pulses):
        t0 = start + k * (pulse_period or 0.0)
        if t0 >= horizon:
            break
        for a, w in _split(gates, t0, pulse_width):
            end = _route_from_port(source_port - 1, a + w / 2, gates)
            if end is None:
                reflections.append((source_port, a, w, amplitude))
            else:
                pending.append((end, a, w, amplitude))

    while pending:
        end, t_launch, width, amp = pending.pop()
        li, side = _END_LINE[end]
        far = _FAR_END[end]
        direction = FORWARD if side == "left" else BACKWARD
        t_arrive = t_launch + delays[li]
        amp_out = amp * gains[li]
        if t_arrive >= horizon:
            segments.append(Segment(LINE_NAMES[li], direction, t_launch, t_arrive, width,
                                    amp_out, source_port, ABSORBED))
            continue
        for a, w in _split(gates, t_arrive, width):
            launch = a - delays[li]
            port = _route_from_end(far, a + w / 2, gates)
            if port is None:
                segments.append(Segment(LINE_NAMES[li], direction, launch, a, w, amp_out,
                                        source_port, REFLECTED))
                pending.append((far, a, w, amp_out))
            else:
                segments.append(Segment(LINE_NAMES[li], direction, launch, a, w, amp_out,
                                        source_port, DELIVERED, port + 1))

    return BounceTrace(tuple(_merge(segments, tol)), tuple(sorted(reflections)), delta, horizon)
