"""``actinwire`` command-line front end.

Every CSV starts with ``# actinwire <version> config-hash=<hex>``. Exit
codes: 0 success, 2 config or usage error, 3 model-domain error; errors are
one line on stderr, prefixed ``actinwire: error[<kind>]:``.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import statistics
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from actinwire import __version__
from actinwire import config as cfgmod
from actinwire.circuit import (
    PAPER_C0,
    PAPER_C_PER_UM,
    PAPER_L0,
    PAPER_L_PER_UM,
    PAPER_R0,
    PAPER_R_PER_UM,
    CircuitSource,
    build_filament,
    monomer_rlc,
)
from actinwire.errors import ActinwireError, ModelDomainError
from actinwire.network import run_campaign
from actinwire.response import PhaseMode, sweep
from actinwire.transport import max_throughput, throughput_curve

SWEEP_COLUMNS = ["freq_hz", "omega_rad_s", "atten_db", "phase_deg", "delay_s"]
THROUGHPUT_COLUMNS = ["t_s", "v_m_s", "throughput_bps"]
COMPARE_COLUMNS = ["t_s", "network", "throughput_bps", "log10_throughput_bps", "ratio_to_fret"]
METRICS_COLUMNS = ["seed", "delivered", "delivery_time_s", "hops", "wires_attempted",
                   "wires_established"]
TIMELINE_COLUMNS = ["seed", "t_s", "informed_fraction"]
SUMMARY_COLUMNS = ["runs", "delivered", "delivery_rate", "mean_delivery_time_s",
                   "std_delivery_time_s", "mean_hops", "std_hops"]
REPORT_COLUMNS = ["quantity", "mode", "value", "published_value", "deviation_pct"]


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.exit(2, f"actinwire: error[usage]: {message}\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence], chash: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# actinwire {__version__} config-hash={chash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _deviation(value: float, ref: float) -> float:
    return 100.0 * (value - ref) / ref


def cmd_derive_components(cfg: dict, out: Path, chash: str) -> int:
    p = cfgmod.physical_params(cfg)
    n_eff = cfg["physical"]["n_eff_per_um"]
    m = monomer_rlc(p)
    rows = [
        ("C0_F", "monomer", m.C0, PAPER_C0, _deviation(m.C0, PAPER_C0)),
        ("L0_H", "monomer", m.L0, PAPER_L0, _deviation(m.L0, PAPER_L0)),
        ("R0_ohm", "monomer", m.R0, PAPER_R0, _deviation(m.R0, PAPER_R0)),
    ]
    for mode in (CircuitSource.DERIVED, CircuitSource.PAPER):
        c = build_filament(p, 1.0, mode, n_eff)
        rows += [
            ("R_eq_per_um_ohm", mode.value, c.R_eq, PAPER_R_PER_UM, _deviation(c.R_eq, PAPER_R_PER_UM)),
            ("L_eq_per_um_H", mode.value, c.L_eq, PAPER_L_PER_UM, _deviation(c.L_eq, PAPER_L_PER_UM)),
            ("C_eq_per_um_F", mode.value, c.C_eq, PAPER_C_PER_UM, _deviation(c.C_eq, PAPER_C_PER_UM)),
        ]
    write_csv(out, REPORT_COLUMNS, rows, chash)
    config_out = out.with_name(out.stem + ".config.toml")
    config_out.write_text(cfgmod.dump_config(cfg))
    for name, mode, value, ref, dev in rows:
        print(f"{name:<16} {mode:<8} {value:.6g}  (published {ref:.6g}, {dev:+.2f}%)")
    print(f"effective config: {config_out}")
    return 0


def _grid_label(x: float) -> str:
    return f"{x:g}".replace(".", "p")


def cmd_sweep(cfg: dict, out: Path, chash: str) -> int:
    s = cfg["sweep"]
    if not s["distances_um"]:
        raise ActinwireError("sweep.distances_um is empty")
    p = cfgmod.physical_params(cfg)
    mode = cfgmod.circuit_mode(cfg)
    phase_modes = list(PhaseMode) if s["both_phase_modes"] else [cfgmod.phase_mode(cfg)]
    out.mkdir(parents=True, exist_ok=True)
    written = 0
    for d in s["distances_um"]:
        circuit = build_filament(p, float(d), mode, cfg["physical"]["n_eff_per_um"])
        for f0, f1, n in s["ranges_hz"]:
            for pm in phase_modes:
                points = sweep(circuit, float(f0), float(f1), int(n), pm)
                name = f"sweep_d{_grid_label(d)}um_{_grid_label(f0)}-{_grid_label(f1)}hz_{pm.value}.csv"
                write_csv(out / name, SWEEP_COLUMNS,
                          ((q.freq_hz, q.omega, q.atten_db, q.phase_deg, q.delay_s) for q in points),
                          chash)
                written += 1
    print(f"sweep: wrote {written} files to {out}")
    return 0


def _time_grid(cfg: dict) -> np.ndarray:
    s = cfg["throughput"]
    if not (0 <= s["t_begin_s"] < s["t_end_s"]) or s["n_points"] < 2:
        raise ActinwireError("throughput grid needs 0 <= t_begin_s < t_end_s and n_points >= 2")
    return np.linspace(s["t_begin_s"], s["t_end_s"], s["n_points"])


def cmd_throughput(cfg: dict, out: Path, chash: str) -> int:
    tp = cfgmod.transport_params(cfg)
    points = throughput_curve(_time_grid(cfg), tp)
    write_csv(out, THROUGHPUT_COLUMNS, ((q.t_s, q.v_m_s, q.throughput_bps) for q in points), chash)
    print(f"throughput: {len(points)} points, T(0) = {points[0].throughput_bps:.6g} bit/s")
    return 0


def _log10(x: float) -> float:
    return math.log10(x) if x > 0 else -math.inf


def cmd_compare_fret(cfg: dict, out: Path, chash: str) -> int:
    tp = cfgmod.transport_params(cfg)
    fret = cfg["compare"]["fret_bps"]
    if not fret > 0:
        raise ActinwireError("compare.fret_bps must be > 0")
    rows = []
    for t in _time_grid(cfg):
        wannet = float(max_throughput(float(t), tp))
        ratio = wannet / fret
        rows.append((float(t), "wannet", wannet, _log10(wannet), ratio))
        rows.append((float(t), "fret_mamnet", fret, _log10(fret), ratio))
    write_csv(out, COMPARE_COLUMNS, rows, chash)
    print(f"compare-fret: ratio at t=0 is {rows[0][4]:.6g}")
    return 0


def _workers() -> int:
    raw = os.environ.get("ACTINWIRE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ActinwireError(f"ACTINWIRE_THREADS must be an integer, got {raw!r}") from None


def cmd_simulate(cfg: dict, out: Path, chash: str) -> int:
    scenario = cfgmod.scenario_config(cfg)
    first = cfg["scenario"]["rng_seed"]
    seeds = range(first, first + cfg["scenario"]["seeds"])
    results = run_campaign(scenario, seeds, workers=_workers())
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "metrics.csv", METRICS_COLUMNS,
              ((m.seed, m.delivered, m.delivery_time_s if m.delivered else None, m.hops_to_gateway,
                m.wires_attempted, m.wires_established) for m in results), chash)
    write_csv(out / "timeline.csv", TIMELINE_COLUMNS,
              ((m.seed, t, f) for m in results for t, f in m.informed_fraction_timeline), chash)
    times = [m.delivery_time_s for m in results if m.delivered]
    hops = [m.hops_to_gateway for m in results if m.delivered]

    def mean(xs):
        return statistics.fmean(xs) if xs else math.nan

    def std(xs):
        return statistics.stdev(xs) if len(xs) > 1 else math.nan

    summary = (len(results), len(times), len(times) / len(results),
               mean(times), std(times), mean(hops), std(hops))
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, [summary], chash)
    print(f"simulate: {len(results)} runs, delivery rate {summary[2]:.4f}, "
          f"mean delivery time {summary[3]:.6g} s, mean hops {summary[5]:.4g}")
    return 0


COMMANDS = {
    "derive-components": cmd_derive_components,
    "sweep": cmd_sweep,
    "throughput": cmd_throughput,
    "compare-fret": cmd_compare_fret,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="actinwire", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"actinwire {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="TOML config file (defaults if omitted)")
    parser.add_argument("--out", type=Path, required=True,
                        help="output CSV file, or directory for sweep/simulate")
    parser.add_argument("--overrides", nargs="*", default=[], metavar="KEY=VALUE")
    parser.add_argument("--seeds", type=int, help="number of simulation seeds")
    parser.add_argument("--mode", choices=[m.value for m in CircuitSource],
                        help="circuit component source")
    parser.add_argument("--phase-mode", choices=[m.value for m in PhaseMode])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load_config(args.config, args.overrides)
        if args.seeds is not None:
            cfgmod.set_value(cfg, "scenario.seeds", args.seeds)
        if args.mode is not None:
            cfgmod.set_value(cfg, "physical.circuit_mode", args.mode)
        if args.phase_mode is not None:
            cfgmod.set_value(cfg, "sweep.phase_mode", args.phase_mode)
        return COMMANDS[args.command](cfg, args.out, cfgmod.config_hash(cfg))
    except ModelDomainError as exc:
        print(f"actinwire: error[model]: {exc}", file=sys.stderr)
        return 3
    except ActinwireError as exc:
        print(f"actinwire: error[config]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
