"""Excited-state dressing (g, e, f ladder), light-shift budget, mode assignment and readout rates.

Rates and Rabi frequencies are angular (rad/s); shifts handed to the cavity
spectrum (``max_shift``, ``exclusion_band``, jitter) are cyclic Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .optics import ModeSpectrum, TransverseMode

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class LevelScheme:
    """Readout / emission level scheme.

    ``branching`` maps decay channels of the dressed upper state to
    probabilities; ``leak_probability`` is the chance that a decay puts a
    photon in the cavity while leaving the atom outside the qubit basis.
    """

    gamma_e: float = TWO_PI * 6e6
    gamma_f: float = TWO_PI * 1.9e6
    branching: dict = field(default_factory=lambda: {"q0": 0.5, "q1": 0.5})
    leak_probability: float = 0.0
    labels: tuple = ("q0", "q1", "g", "e", "f")

    def __post_init__(self):
        if self.gamma_e <= 0 or self.gamma_f < 0:
            raise ValueError("decay rates must be positive")
        probs = list(self.branching.values())
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("branching probabilities must lie in [0, 1]")
        if probs and abs(sum(probs) - 1.0) > 1e-9:
            raise ValueError(f"branching probabilities sum to {sum(probs)}, not 1")
        if not 0.0 <= self.leak_probability < 0.05:
            raise ValueError("leak_probability must lie in [0, 0.05)")


@dataclass(frozen=True)
class DressingField:
    rabi_omega_c: float
    detuning_delta_c: float = 0.0
    intensity_stability: float = 1e-3

    def __post_init__(self):
        if self.rabi_omega_c < 0:
            raise ValueError("rabi_omega_c must be non-negative")
        if self.intensity_stability < 0:
            raise ValueError("intensity_stability must be non-negative")

    @classmethod
    def for_shift(cls, shift_hz: float, intensity_stability: float = 1e-3) -> "DressingField":
        """Resonant field whose e+ shift is ``shift_hz`` (cyclic)."""
        return cls(rabi_omega_c=2 * TWO_PI * abs(shift_hz), intensity_stability=intensity_stability)


@dataclass(frozen=True)
class DressedState:
    shift_plus: float
    shift_minus: float
    coupling_scale: float
    linewidth: float
    gamma_e: float

    @property
    def cooperativity_scale(self) -> float:
        """Cooperativity of |e+> relative to bare |e>: amplitude^2 times the linewidth ratio."""
        return self.coupling_scale**2 * self.gamma_e / self.linewidth


def dress(field: DressingField, scheme: LevelScheme) -> DressedState:
    """Diagonalize the {e, f} block [[0, Om/2], [Om/2, Dc]] (energies relative to bare e)."""
    om, dc = field.rabi_omega_c, field.detuning_delta_c
    ge, gf = scheme.gamma_e, scheme.gamma_f
    if om == 0:
        return DressedState(0.0, dc, 1.0, ge, ge)
    root = math.hypot(dc, om)
    shift_plus = (dc - root) / 2
    shift_minus = (dc + root) / 2
    # e-amplitude of the shift_plus eigenvector (Dc + root, -Om); ratio form avoids
    # underflow and the cancellation in Dc + root for Dc < 0
    ratio = om / (dc + root) if dc >= 0 else (root - dc) / om
    weight_e = 1.0 / (1.0 + ratio * ratio)
    linewidth = weight_e * ge + (1 - weight_e) * gf
    return DressedState(shift_plus, shift_minus, math.sqrt(weight_e), linewidth, ge)


def shift_jitter(field: DressingField) -> float:
    """RMS transition jitter (Hz) of a resonantly dressed level; Rabi scales as sqrt(intensity)."""
    if field.detuning_delta_c != 0:
        raise ValueError("shift_jitter covers the resonant (detuning 0) branch only")
    shift_hz = field.rabi_omega_c / 2 / TWO_PI
    return shift_hz * 0.5 * field.intensity_stability


@dataclass(frozen=True)
class ModeSlot:
    """A usable cavity resonance: transverse mode plus longitudinal copy."""

    mode: TransverseMode
    longitudinal: int
    shift: float

    @property
    def label(self) -> str:
        return f"{self.mode.label}/q{self.longitudinal}"


def assign_modes(
    spectrum: ModeSpectrum,
    max_shift: float,
    n_fsr: int = 1,
    exclusion_band: float = 0.0,
    reference_offset: float = 0.0,
) -> list[ModeSlot]:
    """Modes reachable with a light shift <= ``max_shift`` over ``n_fsr`` longitudinal copies.

    ``reference_offset`` is the detuning of the fundamental resonance from
    the bare transition, added to every required shift.  Modes whose shift
    falls below ``exclusion_band`` are dropped (they sit within the residual
    shift seen by neighbouring atoms).
    """
    if not spectrum.entries:
        raise ValueError("empty spectrum")
    # absorbs float noise on grid points that sit exactly at the limit
    tol = 1e-9 * max(spectrum.fsr, 1.0)
    slots = []
    for q in range(n_fsr):
        for e in spectrum.entries:
            shift = reference_offset + e.frequency_offset + q * spectrum.fsr
            if shift <= max_shift + tol and shift >= exclusion_band:
                slots.append(ModeSlot(e.mode, q, shift))
    slots.sort(key=lambda s: (s.shift, s.longitudinal, s.mode.index_a))
    return slots


@dataclass(frozen=True)
class ReadoutYield:
    photons_into_cavity: float
    collected: float
    collection_efficiency: float
    excited_population: float


def fluorescence_readout(
    rabi_omega_p: float,
    detuning_delta_p: float,
    eta: float,
    dressed: DressedState,
    duration: float,
    kappa_e_fraction: float,
) -> ReadoutYield:
    """Cavity-enhanced fluorescence of a driven two-level atom with a resonant cavity.

    Steady state of a two-level atom with total decay Gamma'(1 + eta); the
    cavity takes eta*Gamma'*rho_ee photons per second.
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    gamma = dressed.linewidth
    gamma_tot = gamma * (1 + eta)
    om2 = rabi_omega_p**2
    rho_ee = om2 / (4 * detuning_delta_p**2 + gamma_tot**2 + 2 * om2)
    into_cavity = eta * gamma * rho_ee * duration
    return ReadoutYield(
        photons_into_cavity=into_cavity,
        collected=into_cavity * kappa_e_fraction,
        collection_efficiency=eta / (1 + eta) * kappa_e_fraction,
        excited_population=rho_ee,
    )


def probe_crosstalk(mode_spacing: float, linewidth: float, probe_suppression: float = 1.0) -> float:
    """Wrong-mode pickup: Lorentzian tail (linewidth / 2 spacing)^2 times probe suppression."""
    if mode_spacing <= 0:
        raise ValueError("mode spacing must be positive")
    if math.isinf(mode_spacing):
        return 0.0
    return (linewidth / (2 * mode_spacing)) ** 2 * probe_suppression
