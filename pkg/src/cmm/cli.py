"""``cmm`` command line: one subcommand per pipeline, CSV/SVG outputs plus a run manifest.

Exit codes: 0 success, 2 configuration or validation error, 1 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from dataclasses import replace
from importlib import metadata
from pathlib import Path

import numpy as np

from . import pipeline as pl
from .config import ConfigError, DesignConfig, load_config
from .layout import write_layout_csv
from .link import budget_row, write_row_csv
from .optics import mode_peak_factor
from .syndrome import scaling_report, simulate_extraction, write_scaling_csv
from .vstirap import array_average_success, build_generator, evolve

COMMANDS = ("spectrum", "coopmap", "syndrome", "bell", "cycle", "vstirap")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


class Run:
    def __init__(self, cfg: DesignConfig, out: Path, seed):
        self.cfg, self.out, self.seed = cfg, out, seed
        self.files: list[str] = []

    def want(self, fmt: str) -> bool:
        return fmt in self.cfg.output.formats

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.out / name


def cmd_spectrum(run: Run) -> None:
    cfg = run.cfg
    cfg.require("cavity")
    geom = pl.geometry(cfg)
    spec = pl.spectrum(cfg)
    if run.want("csv"):
        spec.to_csv(run.path("spectrum.csv"))
    if run.want("svg"):
        from .plots import spectrum_svg

        heights = [mode_peak_factor(e.mode, geom) for e in spec.entries]
        labels = [e.mode.label for e in spec.entries]
        title = f"{len(spec.entries)} modes, grid {spec.spacing / 1e6:.1f} MHz (residual {spec.grid_residual:.2g} Hz)"
        spectrum_svg(run.path("spectrum.svg"), [e.frequency_offset for e in spec.entries], heights, labels, title)
    print(f"spectrum: {len(spec.entries)} modes, spacing {spec.spacing / 1e6:.3f} MHz, residual {spec.grid_residual:.3g} Hz")


def cmd_coopmap(run: Run) -> None:
    cfg = run.cfg
    cfg.require("cavity", "levels", "dressing", "array")
    layout = pl.array_layout(cfg)
    coop = pl.coop_map(cfg, layout)
    summary = {"design": cfg.array.design, "temperature": cfg.array.temperature, **coop.summary()}
    if run.want("csv"):
        write_layout_csv(run.path("layout.csv"), layout, coop)
        write_row_csv(run.path("summary.csv"), summary)
    if run.want("svg"):
        from .plots import coopmap_svg

        title = f"{cfg.array.design}: mean {coop.mean:.2f}, std {coop.std:.2f}"
        coopmap_svg(run.path("coopmap.svg"), layout.positions, coop.eta, title)
    print(f"coopmap: {len(layout)} sites, mean eta {coop.mean:.3f}, std {coop.std:.3f}")


def cmd_syndrome(run: Run) -> None:
    cfg = run.cfg
    cfg.require("search")
    if run.seed is None:
        raise ConfigError("syndrome is stochastic: set output.seed or pass --seed")
    base = pl.search_config(cfg, run.seed)
    s = cfg.search
    points = scaling_report([int(n) for n in s.n_grid], base, mc_trials=s.mc_trials)
    trace = simulate_extraction(base)
    if run.want("csv"):
        write_scaling_csv(run.path("scaling.csv"), points)
        trace.to_csv(run.path("trace.csv"))
    if run.want("svg"):
        from .plots import scaling_svg

        scaling_svg(run.path("scaling.svg"), points)
    print(f"syndrome: trace of {trace.total_queries} queries, {trace.total_time * 1e6:.1f} us, complete={trace.complete}")


def cmd_bell(run: Run) -> None:
    row = pl.bell_row(run.cfg)
    if run.want("csv"):
        write_row_csv(run.path("bell.csv"), row)
    print(
        f"bell: alpha_interface {row['alpha_interface']:.4f}, P_s {row['P_s']:.4f}, "
        f"rate {row['rate_hz'] / 1e6:.3f} MHz at mean P_s {row['mean_P_s']} over {row['n_modes']} modes"
    )


def cmd_cycle(run: Run) -> None:
    budget = pl.cycle_budget(run.cfg)
    row = budget_row(budget)
    if run.want("csv"):
        write_row_csv(run.path("cycle.csv"), row)
    print(
        f"cycle: init {budget.init_time * 1e6:.1f} + scan {budget.scan_time * 1e6:.1f} + local {budget.local_gate_time * 1e6:.1f}"
        f" + measure {budget.measurement_time * 1e6:.2f} = {budget.total * 1e6:.2f} us"
        f" (expected accounting; worst slot {budget.total_worst * 1e6:.2f} us)"
    )


def cmd_vstirap(run: Run) -> None:
    cfg = run.cfg
    cfg.require("dynamics", "levels", "link")
    dyn = cfg.dynamics
    params = pl.dynamics_params(cfg)
    spec = pl.hilbert(cfg)
    solver = dict(n_points=dyn.n_points, rtol=dyn.rtol, atol=dyn.atol)
    main = evolve(build_generator(spec, params, pl.drive(cfg)), **solver)
    slow_drive = replace(pl.drive(cfg, dyn.compare_slope), duration=dyn.compare_duration)
    slow = evolve(build_generator(spec, params, slow_drive), **solver)
    alpha_setup = cfg.link.alpha_setup
    rows = []
    for eta in dyn.eta_sweep:
        em = evolve(build_generator(spec, replace(params, eta=float(eta)), pl.drive(cfg)), **solver).emission
        rows.append((float(eta), em, 0.5 * (em * alpha_setup) ** 2))
    if run.want("csv"):
        main.to_csv(run.path("trajectory.csv"))
        with open(run.path("sweep.csv"), "w") as fh:
            fh.write("param,emission,P_s\n")
            for eta, em, ps in rows:
                fh.write(f"{eta!r},{em!r},{ps!r}\n")
    if run.want("svg"):
        from .plots import trajectory_svg

        trajectory_svg(run.path("trajectory.svg"), [main, slow], ["default ramp", "slow ramp"])
    msg = f"vstirap: emission {main.emission:.4f} (slow ramp {slow.emission:.4f}), trace error {main.trace_error:.1e}"
    if all(b is not None for b in (cfg.cavity, cfg.array, cfg.dressing)) and cfg.array.design == "LG_CHAIN":
        avg = array_average_success(pl.coop_map(cfg).eta, params, pl.drive(cfg), alpha_setup)
        msg += f", array mean P_s {avg.mean_p_success:.4f}"
    print(msg)


HANDLERS = {
    "spectrum": cmd_spectrum,
    "coopmap": cmd_coopmap,
    "syndrome": cmd_syndrome,
    "bell": cmd_bell,
    "cycle": cmd_cycle,
    "vstirap": cmd_vstirap,
}


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc) if epoch else dt.datetime.now(dt.timezone.utc)
    return now.isoformat(timespec="seconds")


def write_manifest(run: Run, command: str) -> None:
    manifest = {
        "command": command,
        "config_hash": run.cfg.hash(),
        "tool_version": _version(),
        "seed": run.seed,
        "timestamp": _timestamp(),
        "files": sorted(run.files + ["run.json"]),
    }
    (run.out / "run.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmm", description="Cavity-mode multiplexing design and simulation")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="YAML design config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="overrides output.seed")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="BLOCK.KEY=VALUE")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        seed = args.seed if args.seed is not None else cfg.output.seed
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        run = Run(cfg, out, seed)
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            HANDLERS[args.command](run)
        write_manifest(run, args.command)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"cmm: configuration error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"cmm: numerical error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
