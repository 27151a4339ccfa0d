"""Acceptance criteria, one test each; sub-checks are reported in the terminal summary."""

import math
import time
from dataclasses import replace

import numpy as np

from cmm import cli
from cmm import pipeline as pl
from cmm.config import load_config, shipped_config
from cmm.layout import ThermalState, thermal_reduction
from cmm.link import alpha_interface, bell_rate, bell_success, cnot_cycle_budget
from cmm.optics import derived_params, lg, mode_peak_factor
from cmm.syndrome import SearchConfig, analytic_time, monte_carlo, search_batch
from cmm.vstirap import (
    HilbertSpec,
    array_average_success,
    build_generator,
    detuning_sensitivity,
    evolve,
    simulate_emission,
)

TWO_PI = 2 * math.pi
T1 = shipped_config("table1_readout")
T2 = shipped_config("table2_link")


class Checks:
    def __init__(self, record_property, name):
        self.items = []
        record_property("criterion", name)
        record_property("checks", self.items)

    def add(self, label, ok, detail):
        self.items.append((label, bool(ok), detail))

    def within(self, label, value, target, rel=None, abs_=None, unit=""):
        tol = abs_ if abs_ is not None else rel * abs(target)
        self.add(label, abs(value - target) <= tol, f"{value:.6g}{unit} vs {target:g}{unit} (tol {tol:.3g})")

    def verdict(self):
        failed = [label for label, ok, _ in self.items if not ok]
        assert not failed, f"failed checks: {failed}"


def test_criterion_1_spectrum(record_property):
    c = Checks(record_property, "1 spectrum self-consistency")
    t0 = time.perf_counter()
    hg_cfg, lg_cfg = load_config(T1), load_config(T2)
    hg_geom, lg_geom = pl.geometry(hg_cfg), pl.geometry(lg_cfg)
    hg_spec, lg_spec = pl.spectrum(hg_cfg), pl.spectrum(lg_cfg)
    hg_dp, lg_dp = derived_params(hg_geom), derived_params(lg_geom)
    c.within("HG grid spacing", hg_spec.spacing, 240e6, rel=1e-3, unit=" Hz")
    c.add("HG grid residual < 1 MHz", hg_spec.grid_residual < 1e6, f"{hg_spec.grid_residual:.3g} Hz over {len(hg_spec.entries)} modes")
    c.within("LG grid spacing", lg_spec.spacing, 727e6, rel=1e-3, unit=" Hz")
    c.add("LG grid residual < 10 MHz", lg_spec.grid_residual < 1e7, f"{lg_spec.grid_residual:.3g} Hz over {len(lg_spec.entries)} modes")
    c.within("readout cavity Rayleigh range", hg_dp.rayleigh_range, 1.6e-3, rel=0.02, unit=" m")
    c.within("link cavity Rayleigh range", lg_dp.rayleigh_range, 0.3e-3, rel=0.02, unit=" m")
    # c/2L with L = 25 mm is 5.996 GHz, so 100 kHz holds to the quoted precision only
    c.within("readout cavity linewidth", hg_dp.linewidth_fwhm, 100e3, rel=1e-3, unit=" Hz")
    c.within("link cavity linewidth", lg_dp.linewidth_fwhm, 2.34e6, rel=0.03, unit=" Hz")
    elapsed = time.perf_counter() - t0
    c.add("runtime", elapsed < 1.0, f"{elapsed * 1e3:.1f} ms")
    c.verdict()


def test_criterion_2_cooperativity_maps(record_property):
    c = Checks(record_property, "2 cooperativity maps")
    t0 = time.perf_counter()
    hg_cfg, lg_cfg = load_config(T1), load_config(T2)
    hg_map = pl.coop_map(hg_cfg)
    lg_map = pl.coop_map(lg_cfg)
    c.within("HG mean eta", hg_map.mean, 6.8, rel=0.2)
    c.within("HG std eta", hg_map.std, 1.9, rel=0.3)
    c.within("LG mean eta at 10 uK", lg_map.mean, 7.0, rel=0.2)
    geom = pl.geometry(lg_cfg)
    dev = max(abs(mode_peak_factor(lg(p), geom) - 1) for p in range(lg_cfg.cavity.max_index + 1))
    c.add("LG peak factor = 1 for all p", dev <= 1e-12, f"max deviation {dev:.2e}")
    temps = np.linspace(0.5e-6, 100e-6, 40)
    grid = np.array([[thermal_reduction(lg(p), ThermalState(t), geom) for t in temps] for p in range(33)])
    c.add("thermal reduction strictly decreasing in T", np.all(np.diff(grid, axis=1) < 0), f"{grid.shape[1]} temperatures x 33 modes")
    c.add("thermal reduction strictly decreasing in p", np.all(np.diff(grid, axis=0) < 0), "33 radial orders")
    elapsed = time.perf_counter() - t0
    c.add("runtime", elapsed < 10, f"{elapsed:.2f} s")
    c.verdict()


def test_criterion_3_syndrome_scaling(record_property):
    c = Checks(record_property, "3 syndrome scaling")
    t0 = time.perf_counter()
    single = SearchConfig(2048, 256, 1, 5e-3, rng_seed=20240601)
    multi = SearchConfig(5000, 256, 50, 5e-3, rng_seed=20240601)
    t_single, t_multi = analytic_time(single), analytic_time(multi)
    c.within("analytic single mode N=2048", t_single, 1.0e-3, rel=0.05, unit=" s")
    c.add("analytic 50 modes N=5000 in 48-62 us", 48e-6 <= t_multi <= 62e-6, f"{t_multi * 1e6:.2f} us")
    speedup = multi.free_space_time / t_multi
    c.add("speedup >= 80x", speedup >= 80, f"{speedup:.1f}x")
    for label, cfg, target in (("single mode N=2048", single, t_single), ("50 modes N=5000", multi, t_multi)):
        mc = monte_carlo(cfg, 100_000)
        c.within(f"Monte Carlo 1e5 trials, {label}", mc.mean, target, rel=0.1, unit=" s")
    bad = 0
    for n in range(1, 17):
        for mask in range(1 << n):
            faults = {i for i in range(n) if mask >> i & 1}
            bad += set(search_batch(0, n, faults)[1]) != faults
    c.add("exhaustive correctness n_batch <= 16", bad == 0, f"{sum(1 << n for n in range(1, 17))} patterns, {bad} wrong")
    elapsed = time.perf_counter() - t0
    c.add("runtime", elapsed < 60, f"{elapsed:.1f} s")
    c.verdict()


def test_criterion_4_link_budget(record_property):
    c = Checks(record_property, "4 link budget")
    t0 = time.perf_counter()
    cfg = load_config(T2)
    k = cfg.link
    alpha = alpha_interface(7.0, TWO_PI * 2.3e6, TWO_PI * 38e3)
    c.within("alpha_interface", alpha, 0.861, abs_=1e-3)
    ps = bell_success(alpha, 0.75)
    c.within("P_s", ps, 0.208, abs_=2e-3)
    rate = bell_rate(k.mean_p_success, k.n_modes, k.attempt_period)
    c.within("rate, 15 modes", rate, 4e6, rel=1e-3, unit=" Hz")
    budget = cnot_cycle_budget()
    c.add("cycle total in 60-80 us", 60e-6 <= budget.total <= 80e-6, f"{budget.total * 1e6:.2f} us (worst slot {budget.total_worst * 1e6:.1f} us)")
    elapsed = time.perf_counter() - t0
    c.add("runtime", elapsed < 0.5, f"{elapsed * 1e3:.1f} ms")
    c.verdict()


def test_criterion_5_vstirap(record_property):
    c = Checks(record_property, "5 vSTIRAP dynamics")
    t0 = time.perf_counter()
    cfg = load_config(T2)
    params = pl.dynamics_params(cfg)
    default = pl.drive(cfg)
    slow = replace(pl.drive(cfg, cfg.dynamics.compare_slope), duration=cfg.dynamics.compare_duration)
    frac = params.kappa_e / params.kappa
    for eta in (1, 3, 7, 20):
        em = simulate_emission(replace(params, eta=float(eta)), slow)
        c.within(f"adiabatic emission eta={eta}", em, eta / (eta + 1) * frac, rel=0.03)
    tr = evolve(build_generator(HilbertSpec(), params, default))
    c.add("trace error < 1e-6", tr.trace_error < 1e-6, f"{tr.trace_error:.2e}")
    em2 = simulate_emission(params, default, HilbertSpec(fock_cutoff=2))
    c.add("Fock cutoff 1 vs 2 < 1e-3", abs(tr.emission - em2) < 1e-3, f"{abs(tr.emission - em2):.2e}")
    runs = [evolve(build_generator(HilbertSpec(), params, replace(default, slope=default.slope * s, duration=6e-6))) for s in (0.25, 0.5, 1, 2, 4, 8)]
    em = np.array([r.emission for r in runs])
    width = np.array([r.photon_width() for r in runs])
    c.add("emission non-increasing in slope", np.all(np.diff(em) <= 0), np.array2string(em, precision=4))
    c.add("photon width non-increasing in slope", np.all(np.diff(width) <= 0), np.array2string(width * 1e9, precision=1) + " ns")
    avg = array_average_success(pl.coop_map(cfg).eta, params, default, cfg.link.alpha_setup)
    c.within("array mean P_s, calibrated ramp", avg.mean_p_success, 0.18, abs_=0.03)
    change = detuning_sensitivity(params, default, [TWO_PI * 6e6])[0]
    c.add("6 MHz detuning changes P_s < 1%", abs(change) < 0.01, f"{change * 100:+.2f}% at the calibrated ramp")
    elapsed = time.perf_counter() - t0
    c.add("runtime", elapsed < 120, f"{elapsed:.1f} s")
    c.verdict()


def test_criterion_6_determinism(record_property, tmp_path):
    c = Checks(record_property, "6 determinism and CLI coverage")
    for config in (T1, T2):
        for command in cli.COMMANDS:
            codes, outs = [], []
            for rep in ("a", "b"):
                out = tmp_path / config.stem / command / rep
                codes.append(cli.main([command, "--config", str(config), "--out", str(out)]))
                outs.append(out)
            names = sorted(p.name for p in outs[0].iterdir()) if outs[0].exists() else []
            # the manifest timestamp is the one field allowed to differ between runs
            same = all(
                (outs[0] / n).read_bytes() == (outs[1] / n).read_bytes() for n in names if n != "run.json"
            )
            c.add(f"{config.stem} {command}", codes == [0, 0] and same and names, f"exit {codes}, {len(names)} files, identical={same}")
    c.verdict()
