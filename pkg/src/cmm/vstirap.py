"""Lindblad simulation of vSTIRAP single-photon generation on atom (x) cavity.

The dressed upper state is a single effective level ``e_plus`` with linewidth
Gamma'.  A classical drive couples g <-> e_plus; the cavity couples e_plus to
the two qubit states with one photon.  Spontaneous decay of e_plus never
returns to g, so a slow ramp reaches eta/(1+eta) * kappa_e/kappa.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

LEVELS = ("g", "e_plus", "q0", "q1", "loss")
MAX_DIM = 64


@dataclass(frozen=True)
class HilbertSpec:
    atomic_levels: tuple = LEVELS
    fock_cutoff: int = 1
    polarization_resolved: bool = False

    def __post_init__(self):
        if tuple(self.atomic_levels) != LEVELS:
            raise ValueError(f"atomic levels must be {LEVELS}")
        if self.fock_cutoff < 1:
            raise ValueError("fock_cutoff must be at least 1")
        if self.dimension > MAX_DIM:
            raise ValueError(f"Hilbert dimension {self.dimension} exceeds {MAX_DIM}")

    @property
    def n_fields(self) -> int:
        return 2 if self.polarization_resolved else 1

    @property
    def dimension(self) -> int:
        return len(self.atomic_levels) * (self.fock_cutoff + 1) ** self.n_fields


@dataclass(frozen=True)
class DynamicsParams:
    """Rates in rad/s; ``eta`` is the cooperativity of the g-e_plus-q Raman leg."""

    eta: float
    kappa_e: float
    kappa_i: float
    gamma: float
    delta_atom: float = 0.0
    delta_cav: float = 0.0
    cavity_weights: dict = field(default_factory=lambda: {"q0": 0.5, "q1": 0.5})
    decay_branching: dict = field(default_factory=lambda: {"q0": 5 / 12, "q1": 5 / 12, "loss": 1 / 6})

    def __post_init__(self):
        for name in ("eta", "kappa_e", "kappa_i", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for table in (self.cavity_weights, self.decay_branching):
            if any(k not in LEVELS for k in table) or any(v < 0 for v in table.values()):
                raise ValueError(f"invalid channel table {table}")
        if abs(sum(self.decay_branching.values()) - 1) > 1e-9:
            raise ValueError("decay branching must sum to 1")
        if abs(sum(self.cavity_weights.values()) - 1) > 1e-9:
            raise ValueError("cavity weights must sum to 1")

    @property
    def kappa(self) -> float:
        return self.kappa_e + self.kappa_i

    @property
    def g(self) -> float:
        """Atom-cavity coupling from g^2 = eta * kappa * gamma / 4."""
        return math.sqrt(self.eta * self.kappa * self.gamma / 4)


@dataclass(frozen=True)
class DriveProfile:
    """Probe Rabi frequency Omega(t) (rad/s): a linear ramp or a tabulated curve."""

    shape: str = "linear_ramp"
    slope: float = 0.0
    duration: float = 1e-6
    table_times: tuple = ()
    table_values: tuple = ()

    def __post_init__(self):
        if self.shape not in ("linear_ramp", "custom"):
            raise ValueError(f"unknown drive shape {self.shape!r}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.shape == "linear_ramp" and self.slope < 0:
            raise ValueError("ramp slope must be non-negative")
        if self.shape == "custom":
            if len(self.table_times) != len(self.table_values) or len(self.table_times) < 2:
                raise ValueError("custom drive needs matching time/value tables")
            if min(self.table_values) < 0:
                raise ValueError("drive must be non-negative")

    def __call__(self, t):
        if self.shape == "linear_ramp":
            return self.slope * np.asarray(t)
        return np.interp(t, self.table_times, self.table_values)


@dataclass
class Generator:
    """Augmented Liouvillian: y = [vec(rho), emitted]; dy/dt = (static + Omega(t) drive) y."""

    spec: HilbertSpec
    params: DynamicsParams
    drive: DriveProfile
    static: np.ndarray
    drive_part: np.ndarray
    number_op: np.ndarray
    projectors: dict

    @property
    def dim(self) -> int:
        return self.spec.dimension


def _basis_ops(spec: HilbertSpec):
    n_lev = len(LEVELS)
    nf = spec.fock_cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, nf)), 1)
    eye_f = np.eye(nf)
    fields = [a] if spec.n_fields == 1 else [np.kron(a, eye_f), np.kron(eye_f, a)]
    field_dim = nf**spec.n_fields
    eye_lev = np.eye(n_lev)

    def atom(i, j):
        m = np.zeros((n_lev, n_lev))
        m[LEVELS.index(i), LEVELS.index(j)] = 1.0
        return np.kron(m, np.eye(field_dim))

    annihilators = [np.kron(eye_lev, f) for f in fields]
    return atom, annihilators


def _superop(h, collapses):
    d = h.shape[0]
    eye = np.eye(d)
    out = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for c in collapses:
        cdc = c.conj().T @ c
        out += np.kron(c, c.conj()) - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))
    return out


def build_generator(spec: HilbertSpec, params: DynamicsParams, drive: DriveProfile) -> Generator:
    atom, annihilators = _basis_ops(spec)
    d = spec.dimension
    g = params.g
    h0 = params.delta_atom * atom("e_plus", "e_plus")
    n_tot = sum(a.conj().T @ a for a in annihilators)
    h0 = h0 + params.delta_cav * n_tot
    # q0 emits into the first field, q1 into the second when polarization is resolved
    for idx, q in enumerate(("q0", "q1")):
        a = annihilators[idx if spec.n_fields == 2 else 0]
        coupling = g * math.sqrt(params.cavity_weights.get(q, 0.0)) * atom("e_plus", q) @ a
        h0 = h0 + coupling + coupling.conj().T
    hd = 0.5 * (atom("e_plus", "g") + atom("g", "e_plus"))
    collapses = [math.sqrt(params.kappa) * a for a in annihilators]
    for target, w in params.decay_branching.items():
        if w > 0:
            collapses.append(math.sqrt(params.gamma * w) * atom(target, "e_plus"))
    static = np.zeros((d * d + 1, d * d + 1), dtype=complex)
    static[: d * d, : d * d] = _superop(h0, collapses)
    # emitted flux kappa_e <n> = kappa_e * sum_ij n_ji rho_ij
    static[d * d, : d * d] = params.kappa_e * n_tot.T.ravel()
    drive_part = np.zeros_like(static)
    drive_part[: d * d, : d * d] = _superop(hd, [])
    projectors = {lev: atom(lev, lev) for lev in LEVELS}
    return Generator(spec, params, drive, static, drive_part, n_tot, projectors)


@dataclass
class TrajectoryResult:
    times: np.ndarray
    photon_flux: np.ndarray
    cumulative_emission: np.ndarray
    populations: dict
    drive: np.ndarray
    trace_error: float
    min_eigenvalue: float

    @property
    def emission(self) -> float:
        return float(self.cumulative_emission[-1])

    def photon_width(self) -> float:
        """RMS duration of the output photon's flux envelope."""
        w = self.photon_flux
        norm = np.trapezoid(w, self.times)
        if norm <= 0:
            return 0.0
        mean = np.trapezoid(w * self.times, self.times) / norm
        return float(math.sqrt(max(np.trapezoid(w * (self.times - mean) ** 2, self.times) / norm, 0.0)))

    def to_csv(self, path) -> None:
        levels = list(self.populations)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "drive", "flux", "cumulative"] + [f"pop_{k}" for k in levels])
            for i, t in enumerate(self.times):
                row = [t, self.drive[i], self.photon_flux[i], self.cumulative_emission[i]]
                row += [self.populations[k][i] for k in levels]
                w.writerow([repr(float(v)) for v in row])


def initial_state(gen: Generator) -> np.ndarray:
    d = gen.dim
    rho = np.zeros((d, d), dtype=complex)
    # |g> (x) vacuum is basis index 0
    rho[0, 0] = 1.0
    return rho


def evolve(gen: Generator, n_points: int = 401, rtol: float = 1e-10, atol: float = 1e-12, rho0=None) -> TrajectoryResult:
    """Integrate the master equation over the drive duration (adaptive DOP853)."""
    d = gen.dim
    rho0 = initial_state(gen) if rho0 is None else np.asarray(rho0, dtype=complex)
    y0 = np.concatenate([rho0.ravel(), [0.0]])
    static, drive_part, drive = gen.static, gen.drive_part, gen.drive

    def rhs(t, y):
        return static @ y + float(drive(t)) * (drive_part @ y)

    t_eval = np.linspace(0.0, gen.drive.duration, n_points)
    sol = solve_ivp(rhs, (0.0, gen.drive.duration), y0, method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise RuntimeError(f"master-equation integration failed: {sol.message}")
    rhos = sol.y[: d * d].T.reshape(-1, d, d)
    emitted = sol.y[d * d].real
    traces = np.einsum("tii->t", rhos).real
    herm = 0.5 * (rhos + np.conj(np.transpose(rhos, (0, 2, 1))))
    min_eig = float(np.min(np.linalg.eigvalsh(herm)))
    n_exp = np.einsum("ij,tji->t", gen.number_op, rhos).real
    pops = {k: np.einsum("ij,tji->t", p, rhos).real for k, p in gen.projectors.items()}
    return TrajectoryResult(
        times=sol.t,
        photon_flux=gen.params.kappa_e * n_exp,
        cumulative_emission=emitted,
        populations=pops,
        drive=np.asarray(drive(sol.t), dtype=float),
        trace_error=float(np.max(np.abs(1 - traces))),
        min_eigenvalue=min_eig,
    )


def emission_probability(traj: TrajectoryResult) -> float:
    return traj.emission


def simulate_emission(params: DynamicsParams, drive: DriveProfile, spec: HilbertSpec | None = None, **kw) -> float:
    return evolve(build_generator(spec or HilbertSpec(), params, drive), **kw).emission


@dataclass(frozen=True)
class ArraySuccess:
    mean_p_success: float
    p_success: np.ndarray
    emission: np.ndarray
    eta_grid: np.ndarray
    grid_emission: np.ndarray


def array_average_success(
    etas, params: DynamicsParams, drive: DriveProfile, alpha_setup: float = 0.75, n_grid: int = 24
) -> ArraySuccess:
    """Per-site P_s from emission interpolated over an eta grid, then averaged over the array."""
    etas = np.asarray(etas, dtype=float)
    if n_grid < 20:
        raise ValueError("eta grid needs at least 20 points")
    lo, hi = float(etas.min()), float(etas.max())
    grid = np.linspace(lo, hi, n_grid) if hi > lo else np.array([lo])
    grid_em = np.array([simulate_emission(replace(params, eta=e), drive) if e > 0 else 0.0 for e in grid])
    em = np.interp(etas, grid, grid_em) if grid.size > 1 else np.full_like(etas, grid_em[0])
    ps = 0.5 * (em * alpha_setup) ** 2
    return ArraySuccess(float(math.fsum(ps) / ps.size), ps, em, grid, grid_em)


def detuning_sensitivity(params: DynamicsParams, drive: DriveProfile, deltas) -> np.ndarray:
    """Relative change of atom-atom P_s (quadratic in emission) vs atomic detuning."""
    ref = simulate_emission(replace(params, delta_atom=0.0), drive)
    out = []
    for dlt in deltas:
        em = ref if dlt == 0 else simulate_emission(replace(params, delta_atom=float(dlt)), drive)
        out.append((em / ref) ** 2 - 1)
    return np.array(out)
