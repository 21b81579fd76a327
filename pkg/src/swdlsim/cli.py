"""``swdlsim`` command-line front end.

Every command writes one or more CSV tables (header row carries units) and,
with ``--format csv,svg``, a matching SVG line plot per table.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import analytic
from .bounce import bounce_trace
from .components import Ramp, SwitchModel
from .config import ConfigError, RunConfig, parse_config, parse_formats
from .engine import (
    SimulationError,
    extract_spectrum,
    extract_sparams,
    snap_frequency,
    sparam_summary,
    switch_module_testbench,
)

__all__ = ["main", "Table", "run_command", "COMMANDS"]

log = logging.getLogger("swdlsim")

EXIT_OK, EXIT_INVALID, EXIT_SIM = 0, 2, 3
SPARAM_CHUNK = 8
TESTBENCH_PERIODS = 8


@dataclass
class Table:
    name: str
    header: List[str]
    rows: List[Sequence]
    # (x column, y columns, x label, y label, title); None skips the SVG
    plot: Optional[Tuple[str, Sequence[str], str, str, str]] = None


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{float(v):.12g}"
    return str(v)


def _write_csv(path: Path, table: Table) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.header)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])


def _write_plot(path: Path, table: Table) -> None:
    from .svg import write_svg

    xcol, ycols, xlabel, ylabel, title = table.plot
    ix = table.header.index(xcol)
    x = [float(r[ix]) for r in table.rows]
    series = []
    for col in ycols:
        iy = table.header.index(col)
        y = [float(r[iy]) if abs(float(r[iy])) < analytic.SATURATED_DB else math.nan for r in table.rows]
        series.append((col, x, y))
    write_svg(path, series, xlabel, ylabel, title)


# --------------------------------------------------------------------------- analytic commands


def _bw_grid(rc: RunConfig, bw_max: float) -> np.ndarray:
    step = rc["sweep.bw_step"]
    n = int(math.floor(bw_max / step + 1e-9))
    return np.round(np.arange(n + 1) * step, 12)


def _il_tables(rc: RunConfig, bw_max: float, prefix: str) -> List[Table]:
    plan = analytic.TonePlan(rc["analytic.f_s_hz"], rc["f_mod_hz"], rc["sweep.harmonic_range"])
    grid = _bw_grid(rc, bw_max)
    positions = rc["sweep.carrier_positions"]
    tables = []
    for shape in (analytic.Shape.BAND_PASS, analytic.Shape.LOW_PASS):
        cols = [f"il_db_carrier_{p:g}" for p in positions]
        curves = [analytic.il_curve(plan, shape, grid, p) for p in positions]
        rows = [[float(x)] + [c[i][1] for c in curves] for i, x in enumerate(grid)]
        tables.append(Table(
            f"{prefix}_{shape.value}",
            ["bw_over_fm"] + cols,
            rows,
            ("bw_over_fm", cols, "BW / f_m", "IL (dB)", f"filtering IL, {shape.value} line"),
        ))
    return tables


def cmd_analytic_il(rc: RunConfig, jobs: int) -> List[Table]:
    return _il_tables(rc, rc["sweep.bw_max"], "analytic_il")


def cmd_repro_fig5(rc: RunConfig, jobs: int) -> List[Table]:
    return _il_tables(rc, 40.0, "fig5")


def _deviation_rows(rc: RunConfig):
    n_tones = rc["sweep.n_tones"]
    rows = []
    for dd in rc["sweep.dd_ratios"]:
        through = [analytic.modulated_tone_level("through", n, dd) for n in range(1, n_tones + 1)]
        if dd > 0:
            leak = [analytic.modulated_tone_level("isolated", n, dd) for n in range(1, n_tones + 1)]
        else:
            leak = [math.nan] * n_tones
        rows.append([dd, analytic.deviation_il(dd), analytic.deviation_isolation(dd)] + through + leak)
    tone_cols = [f"through_n{n}_dbc" for n in range(1, n_tones + 1)]
    tone_cols += [f"isolated_n{n}_dbc" for n in range(1, n_tones + 1)]
    return ["dd_ratio", "il_db", "isolation_db"] + tone_cols, rows


def cmd_analytic_deviation(rc: RunConfig, jobs: int) -> List[Table]:
    header, rows = _deviation_rows(rc)
    return [Table("deviation", header, rows,
                  ("dd_ratio", ["il_db", "isolation_db"], "|dd| / 2 delta", "dB", "delay deviation"))]


def cmd_repro_fig7(rc: RunConfig, jobs: int) -> List[Table]:
    header, rows = _deviation_rows(rc)
    tones = [0] + list(range(3, len(header)))
    return [
        Table("fig7_il", ["dd_ratio", "il_db"], [r[:2] for r in rows],
              ("dd_ratio", ["il_db"], "|dd| / 2 delta", "IL (dB)", "IL vs delay deviation")),
        Table("fig7_isolation", ["dd_ratio", "isolation_db"], [[r[0], r[2]] for r in rows],
              ("dd_ratio", ["isolation_db"], "|dd| / 2 delta", "isolation (dB)", "isolation vs delay deviation")),
        Table("fig7_tones", [header[i] for i in tones], [[r[i] for i in tones] for r in rows],
              ("dd_ratio", [header[i] for i in tones[1:]], "|dd| / 2 delta", "dBc", "intra-modulated tones")),
    ]


def _switchtime_rows(rc: RunConfig):
    n_tones = rc["sweep.n_tones"]
    rows = []
    for ts in rc["sweep.ts_ratios"]:
        eff = analytic.switch_time_effects(ts, n_tones)
        rows.append([ts, eff["il"], eff["return_loss"]] + [eff["tone_levels"][n] for n in range(1, n_tones + 1)])
    return ["ts_ratio", "il_db", "return_loss_db"] + [f"tone_n{n}_dbc" for n in range(1, n_tones + 1)], rows


def cmd_analytic_switchtime(rc: RunConfig, jobs: int) -> List[Table]:
    header, rows = _switchtime_rows(rc)
    return [Table("switchtime", header, rows,
                  ("ts_ratio", ["il_db", "return_loss_db"], "t_s / 2 delta", "dB", "finite switch time"))]


def _testbench_point(args) -> float:
    switch, f_mod, f_s, fs, z0 = args
    return switch_module_testbench(switch, f_mod, f_s, fs, TESTBENCH_PERIODS, False, z0)


def _pool_map(fn: Callable, items: List, jobs: int) -> List:
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        # map preserves submission order, so output order never depends on timing
        return list(pool.map(fn, items))


def cmd_repro_fig9(rc: RunConfig, jobs: int) -> List[Table]:
    header, rows = _switchtime_rows(rc)
    circ = rc.circulator
    fs = circ.sample_rate
    f_mod = circ.modulation_frequency
    window = TESTBENCH_PERIODS * circ.samples_per_period
    f_s = round(rc["analytic.f_s_hz"] * window / fs) * fs / window
    base = circ.switch
    items = []
    for ts in rc["sweep.ts_ratios"]:
        t_sw = ts * 2 * circ.delta
        ramp = Ramp.LINEAR if t_sw > 0 else Ramp.INSTANT
        items.append((SwitchModel(base.r_on, base.r_off, t_sw, ramp), f_mod, f_s, fs, circ.z0))
    ideal = switch_module_testbench(SwitchModel(base.r_on, base.r_off, 0.0, Ramp.INSTANT),
                                    f_mod, f_s, fs, TESTBENCH_PERIODS, False, circ.z0)
    tb = _pool_map(_testbench_point, items, jobs)
    rows = [r + [v, v - ideal] for r, v in zip(rows, tb)]
    header = header + ["testbench_il_db", "testbench_extra_il_db"]
    return [Table("fig9", header, rows,
                  ("ts_ratio", ["il_db", "testbench_extra_il_db"], "t_s / 2 delta", "dB",
                   "switch-time loss: closed form vs testbench"))]


# --------------------------------------------------------------------------- engine commands


def _sparam_chunk(args) -> np.ndarray:
    cfg, freqs, power, ports = args
    return extract_sparams(cfg, freqs, power, ports)


def _sweep(rc: RunConfig, jobs: int) -> Tuple[List[float], np.ndarray]:
    grid = rc.frequency_grid
    if not grid:
        raise ConfigError("sweep", "frequency grid is empty")
    ports = tuple(rc["sweep.source_ports"])
    items = [(rc.circulator, grid[i : i + SPARAM_CHUNK], rc["sweep.power_dbm"], ports)
             for i in range(0, len(grid), SPARAM_CHUNK)]
    parts = _pool_map(_sparam_chunk, items, jobs)
    return grid, np.concatenate(parts, axis=0)


def _sparam_tables(rc: RunConfig, grid, S, prefix: str) -> List[Table]:
    ports = sorted(rc["sweep.source_ports"])
    header = ["frequency_hz"]
    for j in ports:
        for i in range(1, 5):
            header += [f"s{i}{j}_db", f"s{i}{j}_phase_rad"]
    rows = []
    for f, s in zip(grid, S):
        row = [f]
        for j in ports:
            for i in range(1, 5):
                v = s[i - 1, j - 1]
                row += [20 * math.log10(abs(v)) if abs(v) > 0 else -analytic.SATURATED_DB, math.atan2(v.imag, v.real)]
        rows.append(row)
    j0 = ports[0]
    tables = [Table(f"{prefix}_sparams", header, rows,
                    ("frequency_hz", [f"s{i}{j0}_db" for i in range(1, 5)], "frequency (Hz)", "|S| (dB)",
                     f"S parameters, port {j0} excited"))]
    if 1 in ports:
        summary = sparam_summary(grid, S)
        tables.append(Table(f"{prefix}_summary", ["metric", "value"], [[k, v] for k, v in summary.items()]))
    return tables


def cmd_sim_sparams(rc: RunConfig, jobs: int) -> List[Table]:
    grid, S = _sweep(rc, jobs)
    return _sparam_tables(rc, grid, S, "sim")


def cmd_repro_fig17(rc: RunConfig, jobs: int) -> List[Table]:
    grid, S = _sweep(rc, jobs)
    return _sparam_tables(rc, grid, S, "fig17")


def cmd_sim_spectrum(rc: RunConfig, jobs: int) -> List[Table]:
    cfg = rc.circulator
    f_s = snap_frequency(cfg, rc["spectrum.f_s_hz"])
    sp = extract_spectrum(cfg, rc["spectrum.source_port"], f_s, rc["spectrum.observe_port"],
                          rc["spectrum.n_tones"], rc["sweep.power_dbm"])
    rows = [[t.order, t.frequency, t.power_dbm, t.power_dbm - sp.carrier_dbm] for t in sp.tones]
    return [Table("spectrum", ["order", "frequency_hz", "power_dbm", "level_dbc"], rows,
                  ("order", ["level_dbc"], "tone order n (f_s + n f_m)", "dBc",
                   f"port {rc['spectrum.observe_port']} spectrum"))]


def cmd_sim_bounce(rc: RunConfig, jobs: int) -> List[Table]:
    tr = bounce_trace(
        rc.circulator,
        rc["bounce.source_port"],
        rc["bounce.pulse_width_s"],
        rc["bounce.n_periods"],
        rc["bounce.pulse_period_s"],
        rc["bounce.n_pulses"],
        rc["bounce.dead_time_s"],
    )
    header = ["line", "direction", "t_start_s", "t_end_s", "width_s", "amplitude", "origin_port", "fate", "port"]
    seg = Table("bounce", header, [list(s.as_row()) for s in tr.segments])
    refl = Table("bounce_source_reflections", ["port", "t_start_s", "width_s", "amplitude"],
                 [list(r) for r in tr.source_reflections])
    return [seg, refl]


COMMANDS: Dict[str, Callable[[RunConfig, int], List[Table]]] = {
    "analytic-il": cmd_analytic_il,
    "analytic-deviation": cmd_analytic_deviation,
    "analytic-switchtime": cmd_analytic_switchtime,
    "sim-sparams": cmd_sim_sparams,
    "sim-spectrum": cmd_sim_spectrum,
    "sim-bounce": cmd_sim_bounce,
    "repro-fig5": cmd_repro_fig5,
    "repro-fig7": cmd_repro_fig7,
    "repro-fig9": cmd_repro_fig9,
    "repro-fig17": cmd_repro_fig17,
}


def run_command(command: str, rc: RunConfig, out_dir: Path, formats: Sequence[str], jobs: int = 1) -> List[Path]:
    """Run ``command`` and write its tables; files are removed again on failure."""
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    tables = COMMANDS[command](rc, jobs)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    try:
        for t in tables:
            if "csv" in formats:
                p = out_dir / f"{t.name}.csv"
                written.append(p)
                _write_csv(p, t)
            if "svg" in formats and t.plot is not None and t.rows:
                p = out_dir / f"{t.name}.svg"
                written.append(p)
                _write_plot(p, t)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return written


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swdlsim", description="Switched delay-line circulator simulator")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="flat key = value config file (omit for defaults)")
    ap.add_argument("--out", help="output directory (default: output.dir, then $SWDLSIM_OUT, then ./swdlsim_out)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")
    ap.add_argument("--format", dest="formats", help="comma list from csv,svg")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs", "must be >= 1")
        rc = parse_config(args.config)
        formats = rc.formats
        if args.formats:
            try:
                formats = parse_formats(args.formats)
            except ValueError as exc:
                raise ConfigError("--format", str(exc)) from None
        out = args.out or rc["output.dir"] or os.environ.get("SWDLSIM_OUT") or "swdlsim_out"
        paths = run_command(args.command, rc, Path(out), formats, args.jobs)
    except SimulationError as exc:
        print(f"swdlsim: simulation aborted: {exc}", file=sys.stderr)
        return EXIT_SIM
    except (ConfigError, ValueError) as exc:
        print(f"swdlsim: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
