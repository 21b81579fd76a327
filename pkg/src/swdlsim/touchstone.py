"""Minimal Touchstone v1 reader/writer for two-port (.s2p) data."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["TouchstoneError", "TwoPortData", "read_s2p", "write_s2p"]

_FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


class TouchstoneError(ValueError):
    pass


@dataclass(frozen=True)
class TwoPortData:
    """Frequencies in Hz (ascending) and S matrices of shape (n, 2, 2)."""

    frequencies: np.ndarray
    s: np.ndarray
    z0: float = 50.0

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        s = np.asarray(self.s, dtype=complex)
        if f.ndim != 1 or s.shape != (f.size, 2, 2):
            raise TouchstoneError("expected frequencies (n,) and s (n, 2, 2)")
        if f.size < 2 or np.any(np.diff(f) <= 0):
            raise TouchstoneError("frequencies must be strictly ascending with >= 2 points")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "s", s)


def _parse_option_line(line: str):
    tokens = line[1:].upper().split()
    unit, param, fmt, z0 = "GHZ", "S", "MA", 50.0
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in _FREQ_UNITS:
            unit = tok
        elif tok in ("S", "Y", "Z", "H", "G"):
            param = tok
        elif tok in ("RI", "MA", "DB"):
            fmt = tok
        elif tok == "R":
            i += 1
            try:
                z0 = float(tokens[i])
            except (IndexError, ValueError):
                raise TouchstoneError(f"bad reference impedance in {line!r}") from None
        else:
            raise TouchstoneError(f"unknown option token {tok!r}")
        i += 1
    if param != "S":
        raise TouchstoneError(f"only S parameters are supported, got {param}")
    return _FREQ_UNITS[unit], fmt, z0


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    if fmt == "MA":
        mag = a
    else:
        mag = 10 ** (a / 20)
    return mag * np.exp(1j * np.deg2rad(b))


def read_s2p(path) -> TwoPortData:
    text = Path(path).read_text()
    option = None
    values = []
    for raw in text.splitlines():
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if option is not None:
                raise TouchstoneError("more than one option line")
            option = _parse_option_line(line)
            continue
        try:
            values.extend(float(v) for v in line.split())
        except ValueError:
            raise TouchstoneError(f"non-numeric data line: {raw!r}") from None
    if option is None:
        option = _parse_option_line("# GHZ S MA R 50")
    scale, fmt, z0 = option
    if len(values) % 9:
        raise TouchstoneError("two-port data needs 9 columns per frequency point")
    rows = np.array(values, dtype=float).reshape(-1, 9)
    f = rows[:, 0] * scale
    # v1 column order: S11 S21 S12 S22
    s11, s21, s12, s22 = (_to_complex(rows[:, 1 + 2 * k], rows[:, 2 + 2 * k], fmt) for k in range(4))
    s = np.empty((f.size, 2, 2), dtype=complex)
    s[:, 0, 0], s[:, 1, 0], s[:, 0, 1], s[:, 1, 1] = s11, s21, s12, s22
    return TwoPortData(f, s, z0)


def write_s2p(path, data: TwoPortData, comment: str | None = None) -> None:
    """Write RI data in Hz with full float precision (round-trips bit-exactly)."""
    lines = []
    if comment:
        lines.extend(f"! {c}" for c in comment.splitlines())
    lines.append(f"# HZ S RI R {data.z0!r}")
    for f, s in zip(data.frequencies, data.s):
        cols = [f]
        for z in (s[0, 0], s[1, 0], s[0, 1], s[1, 1]):
            cols.extend((z.real, z.imag))
        lines.append(" ".join(repr(float(c)) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n")
