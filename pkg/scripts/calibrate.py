"""Recompute the two calibration constants shipped in the link config.

1. array.branching_factor: scales the LG map so its mean is the target eta at
   the configured temperature (the map is linear in this factor).
2. dynamics.slope: probe ramp slope for which the array-averaged P_s hits the
   target, found by bracketing root search over the slope.

Usage: python scripts/calibrate.py [--config PATH] [--mean-eta 7] [--mean-ps 0.18]
"""

import argparse
import math
from dataclasses import replace

import numpy as np
from scipy.optimize import brentq

from cmm import pipeline as pl
from cmm.config import load_config, shipped_config
from cmm.vstirap import HilbertSpec, array_average_success, build_generator, detuning_sensitivity, evolve

TWO_PI = 2 * math.pi


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(shipped_config("table2_link")))
    ap.add_argument("--mean-eta", type=float, default=7.0)
    ap.add_argument("--mean-ps", type=float, default=0.18)
    ap.add_argument("--slope-bracket", type=float, nargs=2, default=(5.0, 100.0), help="2pi MHz/us")
    args = ap.parse_args()

    cfg = load_config(args.config)
    unit = pl.coop_map(pl.with_block(cfg, "array", branching_factor=1.0))
    factor = args.mean_eta / unit.mean
    cfg = pl.with_block(cfg, "array", branching_factor=round(factor, 4))
    coop = pl.coop_map(cfg)
    print(f"branching_factor = {factor:.6f} (mean eta {coop.mean:.4f}, std {coop.std:.4f} with the rounded value)")

    params = pl.dynamics_params(cfg)

    def drive(s):
        return pl.drive(cfg, TWO_PI * s * 1e12)

    def miss(s):
        return array_average_success(coop.eta, params, drive(s), cfg.link.alpha_setup).mean_p_success - args.mean_ps

    s = brentq(miss, *args.slope_bracket, xtol=1e-4)
    slope = TWO_PI * s * 1e12
    tr = evolve(build_generator(HilbertSpec(), params, drive(s)))
    c = tr.cumulative_emission
    t99 = tr.times[np.searchsorted(c, 0.99 * c[-1])]
    dp = detuning_sensitivity(params, drive(s), [TWO_PI * 6e6])[0]
    print(f"slope = {slope:.8g} rad/s^2 (2pi x {s:.4f} MHz/us)")
    print(f"  emission at eta={params.eta:g}: {tr.emission:.5f}; 99% emitted by {t99 * 1e6:.3f} us")
    print(f"  P_s change at 6 MHz atomic detuning: {dp * 100:+.2f}%")
    slow = replace(drive(s), slope=slope / 2, duration=2 * drive(s).duration)
    print(f"  at half the slope: P_s change {detuning_sensitivity(params, slow, [TWO_PI * 6e6])[0] * 100:+.2f}%")


if __name__ == "__main__":
    main()
