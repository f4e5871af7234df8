"""Command-line frontend composing all toolkit modules.

Subcommands: simulate, gci, signals, train-rom, eval-rom, control.
Every run writes a manifest into its output directory before exiting
successfully. Exit codes: 0 success, 1 runtime failure, 2 usage.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, dump_config, load_config, parse_signal
from .control import FomPlant, PiConfig, RomPlant, run_closed_loop
from .errors import CooktwinError
from .gci import GciReport, GridSample, QuantityOfInterest, gci_three_grid, run_grid_study
from .io import read_csv, write_csv, write_manifest, write_snapshot, write_timeseries_csv
from .rom import (load_rom, rom_error, save_rom, train_lti, train_quadratic,
                  training_set_from_records)
from .simulate import run_simulation


def _load(args) -> ScenarioConfig:
    if args.config:
        return load_config(args.config)
    return ScenarioConfig()


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args):
    cfg = _load(args)
    out = _outdir(args)
    t0 = time.perf_counter()
    scenario = cfg.scenario
    if args.with_disturbance or cfg.disturbance_enabled:
        scenario = scenario.with_overrides(disturbances=(cfg.disturbance,))
    series = run_simulation(scenario)
    csv_path = out / "timeseries.csv"
    write_timeseries_csv(series, csv_path)
    files = [csv_path]
    for t_snap, C, T in series.snapshots:
        for name, data in (("C", C), ("T", T)):
            p = out / f"snapshot_{name}_{t_snap:.0f}s.bin"
            write_snapshot(p, name, data, scenario.mesh_spec.spacing, t_snap)
            files.append(p)
    write_manifest(out, dump_config(cfg), time.perf_counter() - t0,
                   {"steps": series.stats["steps"],
                    "outer_iterations": series.stats["outer_iterations"],
                    "cells": series.stats["cells"]}, files)
    print(f"wrote {csv_path} ({len(series)} samples, "
          f"T_core end {series.T_core[-1]:.2f} K, "
          f"mean C end {series.C_mean[-1]:.4f})")
    return 0


def _parse_inline_samples(pairs):
    samples = []
    for item in pairs:
        try:
            n, phi = item.split(":")
            samples.append(GridSample(phi=float(phi), n_cells=int(n)))
        except ValueError:
            raise CooktwinError(
                f"--sample wants N:PHI with integer N, got {item!r}")
    return samples


def cmd_gci(args):
    cfg = _load(args)
    out = _outdir(args)
    t0 = time.perf_counter()
    if args.sample:
        report = gci_three_grid(_parse_inline_samples(args.sample),
                                safety=cfg.gci.safety)
        samples = None
    else:
        report, samples = run_grid_study(
            cfg.scenario, cfg.gci.spacings,
            QuantityOfInterest(cfg.gci.qoi_probe, cfg.gci.qoi_time),
            safety=cfg.gci.safety)
    print(report.pretty(), end="")
    report_path = Path(out) / "gci_report.txt"
    body = report.pretty()
    if samples:
        body += "samples (n_cells, phi):\n" + "".join(
            f"  {s.n_cells} {s.phi!r}\n" for s in samples)
    report_path.write_text(body, encoding="ascii")
    write_manifest(out, dump_config(cfg), time.perf_counter() - t0,
                   {"apparent_order": report.apparent_order,
                    "gci_percent": report.gci_percent}, [report_path])
    return 0


def cmd_signals(args):
    cfg = _load(args)
    out = _outdir(args)
    t0 = time.perf_counter()
    if args.variant:
        spec = {"variant": args.variant}
        for key, val in (("baseline_k", args.baseline), ("peak_k", args.peak),
                         ("t_up_s", args.t_up), ("t_const_s", args.t_const),
                         ("t_down_s", args.t_down),
                         ("t_period_s", args.t_period),
                         ("t_pulse_s", args.t_pulse),
                         ("t_dead_s", args.t_dead),
                         ("n_pulses", args.n_pulses)):
            if val is not None:
                spec[key] = val
        signal = parse_signal(spec, "signal")
    elif cfg.scenario.input_signal is not None:
        signal = cfg.scenario.input_signal
    else:
        raise CooktwinError("no signal: pass --variant or a config with an "
                            "input block")
    t, v = signal.sample(args.dt, args.duration)
    path = Path(out) / "signal.csv"
    write_csv({"t_s": t, "value_K": v}, path)
    write_manifest(out, dump_config(cfg), time.perf_counter() - t0,
                   {"variant": signal.variant, "samples": int(t.size)},
                   [path])
    print(f"wrote {path} ({t.size} samples)")
    return 0


def _records_from_csvs(paths, convection):
    records = []
    for p in paths:
        cols = read_csv(p)
        for need in ("t_s", "T_in_K", "T_core_K"):
            if need not in cols:
                raise CooktwinError(f"{p}: missing column {need}")
        records.append((cols["t_s"], cols["T_in_K"], cols["T_core_K"],
                        cols.get("conv_mult") if convection else None))
    return records


def cmd_train_rom(args):
    cfg = _load(args)
    out = _outdir(args)
    t0 = time.perf_counter()
    records = _records_from_csvs(args.data, cfg.rom.convection_channel)
    y_ref = records[0][2][0]
    u_ref = cfg.scenario.initial_temperature
    data = training_set_from_records(
        records, cfg.rom.sample_step, y_ref=y_ref, u_ref=u_ref,
        convection_channel=cfg.rom.convection_channel)
    kind = args.kind or cfg.rom.kind
    if kind == "lti":
        rom = train_lti(data, orders=(cfg.rom.na, cfg.rom.nb))
    else:
        rom = train_quadratic(data, orders=(cfg.rom.na, cfg.rom.nb),
                              ridge=cfg.rom.ridge)
    path = Path(out) / f"model_{kind}.ctrom"
    save_rom(rom, path)
    report = rom.training_report
    emax = max(report["e_max"].values())
    print(f"trained {kind} rom on {len(records)} trajectories, "
          f"worst rollout E_max {emax:.4f} K -> {path}")
    write_manifest(out, dump_config(cfg), time.perf_counter() - t0,
                   {"kind": kind, "worst_e_max_K": emax},
                   [path] + list(args.data))
    return 0


def cmd_eval_rom(args):
    cfg = _load(args)
    out = _outdir(args)
    t0 = time.perf_counter()
    rom = load_rom(args.model)
    fom = read_csv(args.fom)
    t_f, u_f, y_f = fom["t_s"], fom["T_in_K"], fom["T_core_K"]
    grid = np.arange(0.0, t_f[-1] + 1e-9, rom.dt)
    u = np.interp(grid, t_f, u_f)[None, :]
    if rom.n_channels == 2:
        conv = (np.interp(grid, t_f, fom["conv_mult"])
                if "conv_mult" in fom else np.ones_like(grid))
        u = np.vstack([u[0], conv])
    y = rom.simulate(u, y0=y_f[0])
    report = rom_error(grid, y, t_f, y_f, name=Path(args.fom).stem)
    print(report.pretty(), end="")
    path = Path(out) / "rom_vs_fom.csv"
    write_csv({"t_s": grid, "T_rom_K": y,
               "T_fom_K": np.interp(grid, t_f, y_f)}, path)
    write_manifest(out, dump_config(cfg), time.perf_counter() - t0,
                   {"e_max_K": report.e_max, "e_rms_K": report.e_rms}, [path])
    return 0


def cmd_control(args):
    cfg = _load(args)
    out = _outdir(args)
    t0 = time.perf_counter()
    disturbance = cfg.disturbance if (args.with_disturbance
                                      or cfg.disturbance_enabled) else None
    if args.plant == "rom":
        if not args.model:
            raise CooktwinError("--plant rom needs --model")
        rom = load_rom(args.model)
        plant = RomPlant(rom, y0=cfg.scenario.initial_temperature,
                         disturbance=disturbance)
    else:
        plant = FomPlant(cfg.scenario, disturbance=disturbance)
    result = run_closed_loop(plant, cfg.control.setpoint, cfg.control.pi,
                             cfg.control.duration)
    path = Path(out) / "closed_loop.csv"
    write_csv(result.columns(), path)
    final = result.measured[-1]
    print(f"closed loop finished: y(end) = {final:.2f} K "
          f"(setpoint {cfg.control.setpoint} K) -> {path}")
    write_manifest(out, dump_config(cfg), time.perf_counter() - t0,
                   {"final_K": final,
                    "setpoint_K": cfg.control.setpoint}, [path])
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="cooktwin",
        description="digital-twin toolkit: coupled water/temperature "
                    "cooking solver, grid verification, reduced-order "
                    "models and PI control")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a full-order scenario")
    p.add_argument("--config", help="scenario YAML (defaults: oven case)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--with-disturbance", action="store_true",
                   help="apply the configured convection disturbance")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gci", help="grid convergence study")
    p.add_argument("--config", help="scenario YAML")
    p.add_argument("--out", default="out")
    p.add_argument("--sample", action="append", metavar="N:PHI",
                   help="inline grid sample (repeat 3x) instead of running "
                        "the solver")
    p.set_defaults(func=cmd_gci)

    p = sub.add_parser("signals", help="dump an excitation signal to CSV")
    p.add_argument("--config", help="scenario YAML with an input block")
    p.add_argument("--out", default="out")
    p.add_argument("--dump", action="store_true",
                   help="accepted for symmetry; dumping is the default")
    p.add_argument("--variant")
    p.add_argument("--baseline", type=float)
    p.add_argument("--peak", type=float)
    p.add_argument("--t-up", dest="t_up", type=float)
    p.add_argument("--t-const", dest="t_const", type=float)
    p.add_argument("--t-down", dest="t_down", type=float)
    p.add_argument("--t-period", dest="t_period", type=float)
    p.add_argument("--t-pulse", dest="t_pulse", type=float)
    p.add_argument("--t-dead", dest="t_dead", type=float)
    p.add_argument("--n-pulses", dest="n_pulses", type=int)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--duration", type=float, default=1200.0)
    p.set_defaults(func=cmd_signals)

    p = sub.add_parser("train-rom", help="identify a ROM from trajectory CSVs")
    p.add_argument("--config")
    p.add_argument("--out", default="out")
    p.add_argument("--kind", choices=("lti", "quad"))
    p.add_argument("--data", nargs="+", required=True,
                   help="trajectory CSV files (timeseries schema)")
    p.set_defaults(func=cmd_train_rom)

    p = sub.add_parser("eval-rom", help="compare a ROM rollout against a FOM "
                                        "trajectory CSV")
    p.add_argument("--config")
    p.add_argument("--out", default="out")
    p.add_argument("--model", required=True, help=".ctrom file")
    p.add_argument("--fom", required=True, help="FOM trajectory CSV")
    p.set_defaults(func=cmd_eval_rom)

    p = sub.add_parser("control", help="run a PI closed loop")
    p.add_argument("--config")
    p.add_argument("--out", default="out")
    p.add_argument("--plant", choices=("rom", "fom"), default="rom")
    p.add_argument("--model", help=".ctrom plant model (rom plant)")
    p.add_argument("--with-disturbance", action="store_true")
    p.set_defaults(func=cmd_control)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CooktwinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
