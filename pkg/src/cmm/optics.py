"""Fabry-Perot cavity geometry, paraxial mode profiles and folded mode spectra.

Frequencies are cyclic (Hz) unless a name says otherwise; decay rates
``kappa_*`` are angular (rad/s), so ``kappa_e + kappa_i = 2*pi*linewidth``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy import constants
from scipy.optimize import brentq
from scipy.special import eval_genlaguerre, eval_hermite, gammaln, roots_hermite

C_LIGHT = constants.c


class Family(str, Enum):
    HG = "HG"
    LG = "LG"


@dataclass(frozen=True)
class CavityGeometry:
    """Symmetric two-mirror Fabry-Perot cavity.

    ``mirror_loss_total`` is the round-trip intrinsic (non-output) loss.  The
    output fraction of the linewidth is either given explicitly or derived
    from that loss against the total round-trip loss ``2*pi/finesse``.
    """

    length: float
    waist_w0: float
    wavelength: float
    finesse: float
    mirror_loss_total: float = 0.0
    output_coupling_fraction: float | None = None
    symmetric: bool = True

    def __post_init__(self):
        for name in ("length", "waist_w0", "wavelength"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not self.finesse > 1:
            raise ValueError(f"finesse must exceed 1, got {self.finesse!r}")
        if self.mirror_loss_total < 0:
            raise ValueError("mirror_loss_total must be non-negative")
        if self.mirror_loss_total > 2 * math.pi / self.finesse:
            raise ValueError("mirror_loss_total exceeds the total round-trip loss 2*pi/F")
        f = self.output_coupling_fraction
        if f is not None and not 0.0 <= f <= 1.0:
            raise ValueError(f"output_coupling_fraction must lie in [0, 1], got {f!r}")

    @classmethod
    def tuned(cls, length, wavelength, finesse, gouy_fold, **kwargs) -> "CavityGeometry":
        """Geometry whose per-order Gouy phase equals ``pi * num/den`` exactly.

        The waist follows from the Rayleigh range ``(L/2)/tan(psi/2)``, i.e.
        the mirror curvature is chosen so the transverse modes land on an
        equal-spacing grid.
        """
        frac = Fraction(*gouy_fold) if isinstance(gouy_fold, tuple) else Fraction(gouy_fold)
        if not 0 < frac < 1:
            raise ValueError("gouy fold must lie strictly between 0 and 1")
        z_r = (length / 2) / math.tan(float(frac) * math.pi / 2)
        w0 = math.sqrt(z_r * wavelength / math.pi)
        return cls(length=length, waist_w0=w0, wavelength=wavelength, finesse=finesse, **kwargs)

    @property
    def rayleigh_range(self) -> float:
        return math.pi * self.waist_w0**2 / self.wavelength

    @property
    def wavenumber(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def fsr(self) -> float:
        return C_LIGHT / (2 * self.length)

    @property
    def linewidth(self) -> float:
        return self.fsr / self.finesse

    @property
    def kappa_fraction(self) -> float:
        """Fraction of the total linewidth that is output coupling."""
        if self.output_coupling_fraction is not None:
            return self.output_coupling_fraction
        return 1.0 - self.mirror_loss_total / (2 * math.pi / self.finesse)

    @property
    def radius_of_curvature(self) -> float:
        return (4 * self.rayleigh_range**2 / self.length + self.length) / 2

    def waist(self, z):
        return self.waist_w0 * np.sqrt(1 + (np.asarray(z) / self.rayleigh_range) ** 2)


@dataclass(frozen=True)
class DerivedParams:
    fsr: float
    linewidth_fwhm: float
    kappa_e: float
    kappa_i: float
    rayleigh_range: float
    gouy_per_order: float

    @property
    def kappa(self) -> float:
        return self.kappa_e + self.kappa_i


def derived_params(geom: CavityGeometry) -> DerivedParams:
    if not geom.symmetric:
        raise ValueError("only symmetric two-mirror cavities are supported")
    z_r = geom.rayleigh_range
    # tool targets the near-concentric regime used by mode multiplexing
    if z_r >= geom.length / 2:
        raise ValueError(
            f"degenerate geometry: Rayleigh range {z_r:.3g} m is not below L/2 = {geom.length / 2:.3g} m"
        )
    kappa = 2 * math.pi * geom.linewidth
    frac = geom.kappa_fraction
    return DerivedParams(
        fsr=geom.fsr,
        linewidth_fwhm=geom.linewidth,
        kappa_e=frac * kappa,
        kappa_i=(1 - frac) * kappa,
        rayleigh_range=z_r,
        gouy_per_order=2 * math.atan(geom.length / (2 * z_r)),
    )


@dataclass(frozen=True)
class TransverseMode:
    """HG(n, m) or LG(p, l); this package only evaluates HG(n,0) and LG(p,0)."""

    family: Family
    index_a: int
    index_b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.index_a < 0:
            raise ValueError("mode index must be non-negative")
        if self.family is Family.HG and self.index_b < 0:
            raise ValueError("HG indices must be non-negative")

    @property
    def transverse_order(self) -> int:
        if self.family is Family.HG:
            return self.index_a + self.index_b
        return 2 * self.index_a + abs(self.index_b)

    @property
    def label(self) -> str:
        return f"{self.family.value}{self.index_a}{self.index_b}"

    def check_supported(self):
        if self.index_b != 0:
            raise ValueError(f"unsupported mode {self.label}: only (n,0) / (p,0) modes are implemented")


def hg(n: int) -> TransverseMode:
    return TransverseMode(Family.HG, n, 0)


def lg(p: int) -> TransverseMode:
    return TransverseMode(Family.LG, p, 0)


@dataclass(frozen=True)
class SpectrumEntry:
    mode: TransverseMode
    longitudinal_offset: int
    frequency_offset: float


@dataclass(frozen=True)
class ModeSpectrum:
    entries: tuple[SpectrumEntry, ...]
    fsr: float
    spacing: float
    grid_residual: float
    grid_tolerance: float = field(default=1e6)

    @property
    def equally_spaced(self) -> bool:
        return self.grid_residual < self.grid_tolerance

    def sorted_offsets(self) -> np.ndarray:
        return np.sort([e.frequency_offset for e in self.entries])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["family", "index_a", "index_b", "order", "offset_hz"])
            for e in self.entries:
                m = e.mode
                w.writerow([m.family.value, m.index_a, m.index_b, m.transverse_order, repr(e.frequency_offset)])


def mode_offsets(
    geom: CavityGeometry, family: Family | str, max_index: int, grid_tolerance: float = 1e6
) -> ModeSpectrum:
    """Fold the transverse-mode resonances for indices ``0..max_index`` into one FSR."""
    family = Family(family)
    dp = derived_params(geom)
    fold = dp.gouy_per_order / math.pi
    entries = []
    for idx in range(max_index + 1):
        mode = TransverseMode(family, idx, 0)
        offset = (mode.transverse_order * fold * dp.fsr) % dp.fsr
        # fmod can land on fsr itself through rounding
        if offset >= dp.fsr:
            offset -= dp.fsr
        entries.append(SpectrumEntry(mode, 0, float(offset)))
    n = len(entries)
    spacing = dp.fsr / n
    ordered = np.sort([e.frequency_offset for e in entries])
    residual = float(np.max(np.abs(ordered - spacing * np.arange(n))))
    return ModeSpectrum(tuple(entries), dp.fsr, spacing, residual, grid_tolerance)


def _hermite_norm(n: int) -> float:
    # 1/sqrt(2^n n!) without overflow
    return math.exp(-0.5 * (n * math.log(2) + gammaln(n + 1)))


def mode_amplitude(mode: TransverseMode, geom: CavityGeometry, x, y, z):
    """Complex paraxial field, normalized so that the transverse integral of |u|^2 is 1."""
    mode.check_supported()
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    z_r = geom.rayleigh_range
    k = geom.wavenumber
    w = geom.waist_w0 * np.sqrt(1 + (z / z_r) ** 2)
    gouy = np.arctan(z / z_r)
    # 1/R(z) written to stay finite at z = 0
    inv_r = z / (z**2 + z_r**2)
    r2 = x**2 + y**2
    phase = np.exp(-1j * k * r2 * inv_r / 2 + 1j * (mode.transverse_order + 1) * gouy)
    if mode.family is Family.HG:
        n = mode.index_a
        base = math.sqrt(2 / math.pi) / w
        herm = _hermite_norm(n) * eval_hermite(n, math.sqrt(2) * x / w)
        amp = base * herm * np.exp(-r2 / w**2)
    else:
        s = 2 * r2 / w**2
        amp = math.sqrt(2 / math.pi) / w * eval_genlaguerre(mode.index_a, 0, s) * np.exp(-r2 / w**2)
    return amp * phase


def intensity(mode: TransverseMode, geom: CavityGeometry, x, y, z):
    return np.abs(mode_amplitude(mode, geom, x, y, z)) ** 2


def _hermite_fn_slope(n: int, xi: float) -> float:
    # d/dxi [H_n(xi) exp(-xi^2/2)] up to the positive factor exp(-xi^2/2)
    hm1 = eval_hermite(n - 1, xi) if n > 0 else 0.0
    return 2 * n * hm1 - xi * eval_hermite(n, xi)


def hg_intensity_maxima(n: int, geom: CavityGeometry) -> list[float]:
    """Positions (m) of the n+1 intensity maxima of HG(n,0) along x at the waist."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return [0.0]
    zeros = np.sort(roots_hermite(n)[0])
    # one extremum of |h_n| between consecutive zeros, one beyond each end
    edges = [zeros[0] - (abs(zeros[0]) + 5.0)] + list(zeros) + [zeros[-1] + abs(zeros[-1]) + 5.0]
    brackets = list(zip(edges[:-1], edges[1:]))
    xis = []
    for lo, hi in brackets:
        # shrink off the zeros so the slope changes sign strictly inside
        eps = 1e-12 * max(1.0, abs(hi - lo))
        xis.append(brentq(lambda s: _hermite_fn_slope(n, s), lo + eps, hi - eps, xtol=1e-14, rtol=1e-15))
    scale = geom.waist_w0 / math.sqrt(2)
    xs = [scale * v for v in xis]
    # exact mirror symmetry
    xs = [0.5 * (a - b) for a, b in zip(xs, reversed(xs))]
    return xs


def peak_cooperativity(geom: CavityGeometry) -> float:
    """Two-level antinode cooperativity of the fundamental mode, 24F/(pi k^2 w0^2)."""
    k = geom.wavenumber
    return 24 * geom.finesse / (math.pi * k**2 * geom.waist_w0**2)


def mode_peak_factor(mode: TransverseMode, geom: CavityGeometry) -> float:
    mode.check_supported()
    ref = intensity(TransverseMode(mode.family, 0), geom, 0.0, 0.0, 0.0)
    if mode.family is Family.LG:
        # radial LG(p,0) intensity peaks on axis
        return float(intensity(mode, geom, 0.0, 0.0, 0.0) / ref)
    xs = hg_intensity_maxima(mode.index_a, geom)
    return float(intensity(mode, geom, xs[-1], 0.0, 0.0) / ref)

