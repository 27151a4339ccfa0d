"""Syndrome readout duration versus array size: free space, one mode, many modes.

Writes scaling.csv and scaling.svg, and prints how the Monte Carlo makespan of
the multimode variant compares with the expected per-batch count.

Usage: python scripts/fig3_scaling.py [--config PATH] [--out DIR] [--trials N]
"""

import argparse
from pathlib import Path

from cmm import pipeline as pl
from cmm.config import load_config, shipped_config
from cmm.plots import scaling_svg
from cmm.syndrome import analytic_time, monte_carlo, scaling_report, write_scaling_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(shipped_config("table1_readout")))
    ap.add_argument("--out", default="fig3")
    ap.add_argument("--trials", type=int, default=2000)
    args = ap.parse_args()

    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = pl.search_config(cfg, cfg.output.seed or 0)
    points = scaling_report([int(n) for n in cfg.search.n_grid], base, mc_trials=args.trials)
    write_scaling_csv(out / "scaling.csv", points)
    scaling_svg(out / "scaling.svg", points)

    mc = monte_carlo(base, args.trials)
    t = analytic_time(base)
    print(f"N={base.n_atoms}, {base.n_modes} modes, batch {base.batch_size}")
    print(f"  expected count:        {t * 1e6:8.2f} us")
    print(f"  MC mean busy per mode: {mc.mean_mode_busy * 1e6:8.2f} us")
    print(f"  MC mean makespan:      {mc.mean * 1e6:8.2f} us (+/- {mc.std * 1e6:.2f})")
    print(f"  speedup vs free space: {base.free_space_time / t:.0f}x expected, {base.free_space_time / mc.mean:.0f}x makespan")


if __name__ == "__main__":
    main()
