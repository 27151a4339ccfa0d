"""Reference atom-array layouts and per-atom cooperativity maps."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import constants
from scipy.special import eval_genlaguerre, roots_hermite, roots_laguerre

from .dressing import DressingField, LevelScheme, ModeSlot, dress
from .optics import CavityGeometry, Family, TransverseMode, derived_params, hg_intensity_maxima, intensity, peak_cooperativity

RB87_MASS = 86.909180527 * constants.atomic_mass


class Design(str, Enum):
    HG_READOUT = "HG_READOUT"
    LG_CHAIN = "LG_CHAIN"


@dataclass(frozen=True)
class AtomSite:
    position: tuple
    register_id: int
    mode_id: int
    applied_shift: float


@dataclass
class ArrayLayout:
    """Site arrays plus the mode slots they address (``mode_ids`` index into ``modes``)."""

    positions: np.ndarray
    register_ids: np.ndarray
    mode_ids: np.ndarray
    modes: list[ModeSlot]
    geometry: CavityGeometry
    design: Design
    min_spacing: float
    violations: list = field(default_factory=list)

    def __len__(self):
        return len(self.positions)

    @property
    def applied_shifts(self) -> np.ndarray:
        shifts = np.array([m.shift for m in self.modes])
        return shifts[self.mode_ids]

    @property
    def n_registers(self) -> int:
        return int(self.register_ids.max()) + 1 if len(self) else 0

    @property
    def sites(self) -> list[AtomSite]:
        shifts = self.applied_shifts
        return [
            AtomSite(tuple(p), int(r), int(m), float(s))
            for p, r, m, s in zip(self.positions, self.register_ids, self.mode_ids, shifts)
        ]

    def site_modes(self) -> list[TransverseMode]:
        return [self.modes[m].mode for m in self.mode_ids]


def _slot_index(modes: list[ModeSlot], mode: TransverseMode, q: int) -> int:
    for i, s in enumerate(modes):
        if s.mode == mode and s.longitudinal == q:
            return i
    raise KeyError(f"no slot for {mode.label} in longitudinal copy {q}")


def build_hg_layout(
    geom: CavityGeometry,
    modes: list[ModeSlot],
    n_transverse: int = 25,
    atoms_per_column: int = 256,
    registers_per_column: int = 2,
    spacing_z: float = 4e-6,
    min_spacing: float = 4e-6,
) -> ArrayLayout:
    """Columns along z at the outermost HG(n,0) maximum; odd n on +x, even n on -x.

    Each column is cut into ``registers_per_column`` contiguous registers,
    register r coupling to longitudinal copy r of the column's transverse mode.
    """
    if atoms_per_column % registers_per_column:
        raise ValueError("atoms_per_column must divide evenly into registers")
    if atoms_per_column * spacing_z > geom.length:
        raise ValueError("column longer than the cavity")
    per_reg = atoms_per_column // registers_per_column
    z = (np.arange(atoms_per_column) - (atoms_per_column - 1) / 2) * spacing_z
    xs, pos, regs, mids = [], [], [], []
    for n in range(n_transverse):
        x = hg_intensity_maxima(n, geom)[-1]
        x = x if n % 2 else -x
        xs.append(x)
        for r in range(registers_per_column):
            sl = slice(r * per_reg, (r + 1) * per_reg)
            m = _slot_index(modes, TransverseMode(Family.HG, n), r)
            pos.append(np.column_stack([np.full(per_reg, x), np.zeros(per_reg), z[sl]]))
            regs.append(np.full(per_reg, n * registers_per_column + r))
            mids.append(np.full(per_reg, m))
    layout = ArrayLayout(
        positions=np.concatenate(pos),
        register_ids=np.concatenate(regs),
        mode_ids=np.concatenate(mids),
        modes=list(modes),
        geometry=geom,
        design=Design.HG_READOUT,
        min_spacing=min_spacing,
    )
    cols = np.sort(np.asarray(xs))
    gaps = np.diff(cols)
    for i in np.flatnonzero(gaps < min_spacing * (1 - 1e-9)):
        layout.violations.append((float(cols[i]), float(cols[i + 1]), float(gaps[i])))
    if spacing_z < min_spacing * (1 - 1e-9):
        layout.violations.append(("axial", spacing_z))
    if layout.violations:
        warnings.warn(f"HG layout violates the {min_spacing:g} m minimum spacing: {layout.violations}")
    return layout


def build_lg_chain(
    geom: CavityGeometry,
    modes: list[ModeSlot],
    n_atoms: int = 225,
    spacing_z: float = 3e-6,
    n_registers: int = 15,
    min_spacing: float = 3e-6,
) -> ArrayLayout:
    """On-axis chain centred in the cavity, contiguous registers, register k on ``modes[k]``."""
    if n_atoms % n_registers:
        raise ValueError("n_atoms must be divisible by n_registers")
    if len(modes) < n_registers:
        raise ValueError(f"{n_registers} registers need as many usable modes, got {len(modes)}")
    z = (np.arange(n_atoms) - (n_atoms - 1) / 2) * spacing_z
    per_reg = n_atoms // n_registers
    regs = np.arange(n_atoms) // per_reg
    span = (n_atoms - 1) * spacing_z
    z_r = geom.rayleigh_range
    if span > 2 * z_r * 1.2:
        warnings.warn(f"chain span {span:.3g} m exceeds 2 z_R by more than 20%")
    layout = ArrayLayout(
        positions=np.column_stack([np.zeros(n_atoms), np.zeros(n_atoms), z]),
        register_ids=regs,
        mode_ids=regs.copy(),
        modes=list(modes),
        geometry=geom,
        design=Design.LG_CHAIN,
        min_spacing=min_spacing,
    )
    if spacing_z < min_spacing * (1 - 1e-9):
        layout.violations.append(("axial", spacing_z))
    return layout


@dataclass(frozen=True)
class ThermalState:
    temperature: float
    trap_frequency_radial: float = 2 * math.pi * 100e3
    mass: float = RB87_MASS

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.trap_frequency_radial <= 0:
            raise ValueError("trap frequency must be positive")

    @property
    def sigma_r(self) -> float:
        """Per-axis RMS position spread of a thermal atom in a harmonic trap."""
        return math.sqrt(constants.k * self.temperature / (self.mass * self.trap_frequency_radial**2))


def thermal_reduction(mode: TransverseMode, thermal: ThermalState, geom: CavityGeometry) -> float:
    """On-axis intensity averaged over a 2-D thermal Gaussian, relative to the T = 0 value.

    With s = 2r^2/w0^2 the average is b/(1+b) * int L_p(t/(1+b))^2 e^{-t} dt,
    b = w0^2/(4 sigma^2); Gauss-Laguerre with p+1 nodes is exact for it.
    """
    if mode.family is not Family.LG:
        raise ValueError("thermal_reduction is defined for LG(p,0) modes")
    mode.check_supported()
    sigma = thermal.sigma_r
    if sigma == 0:
        return 1.0
    b = geom.waist_w0**2 / (4 * sigma**2)
    p = mode.index_a
    t, w = roots_laguerre(p + 1)
    val = np.sum(w * eval_genlaguerre(p, 0, t / (1 + b)) ** 2)
    return float(b / (1 + b) * val)


def thermal_average_intensity(mode, geom, x, y, z, sigma, order=24):
    """Transverse-Gaussian average of |u|^2 around (x, y, z) by Gauss-Hermite quadrature."""
    if sigma == 0:
        return intensity(mode, geom, x, y, z)
    nodes, weights = roots_hermite(order)
    d = math.sqrt(2) * sigma * nodes
    wx = weights / math.sqrt(math.pi)
    x = np.asarray(x, dtype=float)[..., None, None]
    y = np.asarray(y, dtype=float)[..., None, None]
    z = np.asarray(z, dtype=float)[..., None, None]
    vals = intensity(mode, geom, x + d[:, None], y + d[None, :], z)
    return np.einsum("...ij,i,j->...", vals, wx, wx)


@dataclass
class CooperativityMap:
    eta: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.eta))

    @property
    def std(self) -> float:
        return float(np.std(self.eta))

    def summary(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "min": float(np.min(self.eta)),
            "max": float(np.max(self.eta)),
            "n_sites": int(self.eta.size),
        }


def dressing_factors(layout: ArrayLayout, scheme: LevelScheme) -> np.ndarray:
    """Per-slot cooperativity scale of the resonantly dressed upper state."""
    return np.array([dress(DressingField.for_shift(s.shift), scheme).cooperativity_scale for s in layout.modes])


def cooperativity_map(
    layout: ArrayLayout,
    scheme: LevelScheme,
    thermal: ThermalState | None = None,
    branching_factor: float = 1.0,
    dressing: bool = True,
) -> CooperativityMap:
    """eta = eta0 * |u(site)|^2/|u00(0)|^2 * dressing * branching * thermal.

    The intensity ratio is the full paraxial field at the site, so it carries
    both the transverse profile and the axial 1/(1+(z/z_R)^2) envelope.
    """
    geom = layout.geometry
    eta0 = peak_cooperativity(geom)
    ref = 2 / (math.pi * geom.waist_w0**2)
    sigma = thermal.sigma_r if thermal is not None else 0.0
    rel = np.empty(len(layout))
    for mid in np.unique(layout.mode_ids):
        sel = layout.mode_ids == mid
        mode = layout.modes[mid].mode
        x, y, z = layout.positions[sel].T
        if mode.family is Family.LG and sigma > 0 and np.allclose(x, 0) and np.allclose(y, 0):
            vals = intensity(mode, geom, x, y, z) * thermal_reduction(mode, thermal, geom)
        else:
            vals = thermal_average_intensity(mode, geom, x, y, z, sigma)
        rel[sel] = vals / ref
    dress_f = dressing_factors(layout, scheme)[layout.mode_ids] if dressing else 1.0
    return CooperativityMap(eta0 * rel * dress_f * branching_factor)


@dataclass(frozen=True)
class ControlCrosstalk:
    neighbor_distance: np.ndarray
    residual_shift: np.ndarray

    @property
    def exclusion_band(self) -> float:
        return float(np.max(self.residual_shift)) if self.residual_shift.size else 0.0


def residual_shift(applied_shift: float, distance, beam_waist: float = 2e-6):
    """Shift seen at ``distance`` from a Gaussian control beam; shift ~ Rabi ~ sqrt(intensity)."""
    d = np.asarray(distance, dtype=float)
    return applied_shift * np.sqrt(np.exp(-2 * d**2 / beam_waist**2))


def control_crosstalk_map(layout: ArrayLayout, beam_waist: float = 2e-6, applied_shift: float = 12e9) -> ControlCrosstalk:
    """Residual shift on each site's nearest neighbour when that site is driven."""
    if layout.design is not Design.LG_CHAIN:
        raise ValueError("control crosstalk is modelled for the 1-D LG chain")
    z = np.sort(layout.positions[:, 2])
    if z.size < 2:
        return ControlCrosstalk(np.array([]), np.array([]))
    gaps = np.diff(z)
    nearest = np.minimum(np.r_[np.inf, gaps], np.r_[gaps, np.inf])
    return ControlCrosstalk(nearest, residual_shift(applied_shift, nearest, beam_waist))


def dispersive_shift(eta: float, kappa: float, gamma: float, detuning: float) -> float:
    """Cavity pull g^2/Delta (rad/s) of one atom, with g^2 = eta*kappa*gamma/4."""
    return eta * kappa * gamma / 4 / detuning


@dataclass(frozen=True)
class DispersiveLoad:
    pull: float
    abs_pull: float
    linewidth: float

    @property
    def fraction_of_linewidth(self) -> float:
        return abs(self.pull) / self.linewidth


def dispersive_load(
    mode_id: int,
    layout: ArrayLayout,
    scheme: LevelScheme,
    p_synd: float,
    branching_factor: float = 1.0,
) -> DispersiveLoad:
    """Expected frequency pull (Hz) of one mode from atoms of other modes sitting in |1>.

    Each atom i is resonant with its own slot, so its detuning from mode j is
    the slot-shift difference; its coupling to mode j uses mode j's intensity
    at the atom.
    """
    geom = layout.geometry
    dp = derived_params(geom)
    target = layout.modes[mode_id]
    others = layout.mode_ids != mode_id
    x, y, z = layout.positions[others].T
    ref = 2 / (math.pi * geom.waist_w0**2)
    overlap = intensity(target.mode, geom, x, y, z) / ref
    slot_dress = dressing_factors(layout, scheme)
    slot_gamma = np.array([dress(DressingField.for_shift(s.shift), scheme).linewidth for s in layout.modes])
    ids = layout.mode_ids[others]
    eta_ij = peak_cooperativity(geom) * overlap * slot_dress[ids] * branching_factor
    detuning = 2 * math.pi * (layout.applied_shifts[others] - target.shift)
    pulls = p_synd * dispersive_shift(eta_ij, dp.kappa, slot_gamma[ids], detuning) / (2 * math.pi)
    return DispersiveLoad(float(np.sum(pulls)), float(np.sum(np.abs(pulls))), dp.linewidth_fwhm)


def write_layout_csv(path, layout: ArrayLayout, coop: CooperativityMap) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["site_id", "x", "y", "z", "register", "mode", "eta"])
        for i, (p, r, m, e) in enumerate(zip(layout.positions, layout.register_ids, layout.mode_ids, coop.eta)):
            w.writerow([i, repr(float(p[0])), repr(float(p[1])), repr(float(p[2])), int(r), int(m), repr(float(e))])
