"""Builders that turn a DesignConfig into module objects (shared by the CLI and scripts)."""

from __future__ import annotations

from dataclasses import replace

from .config import DesignConfig
from .dressing import LevelScheme, ModeSlot, assign_modes
from .layout import (
    ArrayLayout,
    CooperativityMap,
    ThermalState,
    build_hg_layout,
    build_lg_chain,
    control_crosstalk_map,
    cooperativity_map,
)
from .link import AttemptSchedule, CycleBudget, LinkBudget, alpha_interface, bell_rate, bell_success, cnot_cycle_budget
from .optics import CavityGeometry, Family, ModeSpectrum, mode_offsets
from .syndrome import SearchConfig
from .vstirap import DriveProfile, DynamicsParams, HilbertSpec


def geometry(cfg: DesignConfig) -> CavityGeometry:
    cfg.require("cavity")
    c = cfg.cavity
    kw = dict(wavelength=c.wavelength, finesse=c.finesse, mirror_loss_total=c.mirror_loss_total)
    if c.gouy_fold is not None:
        return CavityGeometry.tuned(c.length, gouy_fold=tuple(int(v) for v in c.gouy_fold), **kw)
    return CavityGeometry(length=c.length, waist_w0=c.waist_w0, **kw)


def spectrum(cfg: DesignConfig) -> ModeSpectrum:
    c = cfg.cavity
    return mode_offsets(geometry(cfg), Family(c.family), c.max_index, c.grid_tolerance)


def level_scheme(cfg: DesignConfig) -> LevelScheme:
    cfg.require("levels")
    lv = cfg.levels
    return LevelScheme(gamma_e=lv.gamma_e, gamma_f=lv.gamma_f, branching=dict(lv.branching), leak_probability=lv.leak_probability)


def mode_slots(cfg: DesignConfig) -> list[ModeSlot]:
    """Usable slots; for the LG chain the control-crosstalk band is removed when configured."""
    cfg.require("cavity", "dressing", "array")
    d = cfg.dressing
    spec = spectrum(cfg)
    slots = assign_modes(spec, d.max_shift, d.n_fsr, 0.0, d.reference_offset)
    if cfg.array.design == "LG_CHAIN" and d.exclude_control_crosstalk:
        trial = _layout_from_slots(cfg, slots)
        band = control_crosstalk_map(trial, d.control_beam_waist, d.max_shift).exclusion_band
        slots = assign_modes(spec, d.max_shift, d.n_fsr, band, d.reference_offset)
    return slots


def _layout_from_slots(cfg: DesignConfig, slots) -> ArrayLayout:
    a, geom = cfg.array, geometry(cfg)
    if a.design == "LG_CHAIN":
        return build_lg_chain(geom, slots, a.n_atoms, a.spacing_z, a.n_registers, a.min_spacing)
    return build_hg_layout(geom, slots, a.n_transverse, a.atoms_per_column, a.registers_per_column, a.spacing_z, a.min_spacing)


def array_layout(cfg: DesignConfig) -> ArrayLayout:
    return _layout_from_slots(cfg, mode_slots(cfg))


def thermal_state(cfg: DesignConfig, temperature: float | None = None) -> ThermalState:
    a = cfg.array
    t = a.temperature if temperature is None else temperature
    return ThermalState(t, a.trap_frequency_radial)


def coop_map(cfg: DesignConfig, layout: ArrayLayout | None = None, temperature: float | None = None) -> CooperativityMap:
    layout = layout or array_layout(cfg)
    return cooperativity_map(layout, level_scheme(cfg), thermal_state(cfg, temperature), cfg.array.branching_factor)


def search_config(cfg: DesignConfig, seed: int = 0) -> SearchConfig:
    cfg.require("search")
    s = cfg.search
    return SearchConfig(s.n_atoms, s.n_batch, s.n_modes, s.p_synd, s.t_query, s.free_space_time, seed)


def link_budget(cfg: DesignConfig) -> LinkBudget:
    cfg.require("link")
    k = cfg.link
    return LinkBudget(k.eta, k.kappa_e, k.kappa_i, k.alpha_setup)


def attempt_schedule(cfg: DesignConfig) -> AttemptSchedule:
    k = cfg.link
    return AttemptSchedule(k.n_registers, k.atoms_per_register, k.switching_time, k.photon_window)


def bell_row(cfg: DesignConfig) -> dict:
    lb = link_budget(cfg)
    k = cfg.link
    alpha = alpha_interface(lb.eta, lb.kappa_e, lb.kappa_i)
    p_s = bell_success(alpha, lb.alpha_setup)
    return {
        "eta": lb.eta,
        "kappa_e": lb.kappa_e,
        "kappa_i": lb.kappa_i,
        "alpha_interface": alpha,
        "alpha_setup": lb.alpha_setup,
        "P_s": p_s,
        "mean_P_s": k.mean_p_success,
        "n_modes": k.n_modes,
        "attempt_period": k.attempt_period,
        "rate_hz": bell_rate(k.mean_p_success, k.n_modes, k.attempt_period),
        "rate_peak_hz": bell_rate(p_s, k.n_modes, k.attempt_period),
        "scan_attempt_period": k.switching_time + k.photon_window,
    }


def cycle_budget(cfg: DesignConfig) -> CycleBudget:
    cfg.require("link")
    k = cfg.link
    return cnot_cycle_budget(k.pairs_needed, k.n_modes, k.t_measure, attempt_schedule(cfg), k.init_time, k.local_gate_time)


def dynamics_params(cfg: DesignConfig, eta: float | None = None) -> DynamicsParams:
    """Effective-level parameters; cavity rates come from the link block, Gamma' = (Gamma_e + Gamma_f)/2."""
    cfg.require("dynamics", "levels", "link")
    dyn, lv, k = cfg.dynamics, cfg.levels, cfg.link
    return DynamicsParams(
        eta=dyn.eta if eta is None else eta,
        kappa_e=k.kappa_e,
        kappa_i=k.kappa_i,
        gamma=(lv.gamma_e + lv.gamma_f) / 2,
        delta_atom=dyn.delta_atom,
        delta_cav=dyn.delta_cav,
    )


def drive(cfg: DesignConfig, slope: float | None = None) -> DriveProfile:
    dyn = cfg.dynamics
    return DriveProfile("linear_ramp", dyn.slope if slope is None else slope, dyn.duration)


def hilbert(cfg: DesignConfig) -> HilbertSpec:
    dyn = cfg.dynamics
    return HilbertSpec(fock_cutoff=dyn.fock_cutoff, polarization_resolved=dyn.polarization_resolved)


def with_block(cfg: DesignConfig, name: str, **changes) -> DesignConfig:
    return replace(cfg, **{name: replace(getattr(cfg, name), **changes)})
