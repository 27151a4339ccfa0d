"""Heralded remote-entanglement link budget and teleported-CNOT cycle time."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass

from scipy import stats


@dataclass(frozen=True)
class LinkBudget:
    eta: float
    kappa_e: float
    kappa_i: float
    alpha_setup: float = 0.75

    def __post_init__(self):
        if self.kappa_e < 0 or self.kappa_i < 0 or self.kappa_e + self.kappa_i == 0:
            raise ValueError("cavity decay rates must be non-negative and not both zero")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if not 0.0 <= self.alpha_setup <= 1.0:
            raise ValueError("alpha_setup must lie in [0, 1]")


def alpha_interface(eta: float, kappa_e: float, kappa_i: float) -> float:
    """Photon extraction probability eta/(eta+1) * kappa_e/(kappa_e+kappa_i)."""
    if kappa_e < 0 or kappa_i < 0 or kappa_e + kappa_i == 0:
        raise ValueError("cavity decay rates must be non-negative and not both zero")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    return eta / (eta + 1) * kappa_e / (kappa_e + kappa_i)


def bell_success(alpha_interface: float, alpha_setup: float) -> float:
    """Two-photon heralding probability, 1/2 (alpha_interface * alpha_setup)^2."""
    for v in (alpha_interface, alpha_setup):
        if not 0.0 <= v <= 1.0:
            raise ValueError("efficiencies must lie in [0, 1]")
    return 0.5 * (alpha_interface * alpha_setup) ** 2


def bell_rate(p_success: float, n_modes: int, attempt_period: float) -> float:
    if attempt_period <= 0:
        raise ValueError("attempt_period must be positive")
    return n_modes * p_success / attempt_period


@dataclass(frozen=True)
class ScanYield:
    expected: float
    n: int
    p: float

    def prob_at_least(self, k: int) -> float:
        return float(stats.binom.sf(k - 1, self.n, self.p))


def pairs_from_scan(n_atoms: int, mean_p_success: float) -> ScanYield:
    if not 0.0 <= mean_p_success <= 1.0:
        raise ValueError("mean_p_success must be a probability")
    return ScanYield(n_atoms * mean_p_success, n_atoms, mean_p_success)


@dataclass(frozen=True)
class AttemptSchedule:
    n_registers: int = 15
    atoms_per_register: int = 15
    switching_time: float = 100e-9
    photon_window: float = 0.7e-6

    def __post_init__(self):
        if self.n_registers <= 0 or self.atoms_per_register <= 0:
            raise ValueError("register counts must be positive")
        if self.switching_time < 0 or self.photon_window < 0:
            raise ValueError("durations must be non-negative")


def scan_time(schedule: AttemptSchedule) -> float:
    """Registers scan in parallel, so only the atoms per register enter."""
    return schedule.atoms_per_register * (schedule.switching_time + schedule.photon_window)


@dataclass(frozen=True)
class CycleBudget:
    init_time: float
    scan_time: float
    local_gate_time: float
    measurement_time: float
    measurement_time_worst: float
    accounting: str = "expected"

    @property
    def total(self) -> float:
        return self.init_time + self.scan_time + self.local_gate_time + self.measurement_time

    @property
    def total_worst(self) -> float:
        return self.init_time + self.scan_time + self.local_gate_time + self.measurement_time_worst


def cnot_cycle_budget(
    pairs_needed: int = 40,
    n_modes: int = 15,
    t_measure: float = 10e-6,
    schedule: AttemptSchedule | None = None,
    init_time: float = 16e-6,
    local_gate_time: float = 20e-6,
) -> CycleBudget:
    """Cycle time for ``pairs_needed`` teleported CNOTs.

    Measurement is multiplexed over ``n_modes``: the default total uses the
    expected (pairs/n_modes) count of measurement rounds, the worst-slot
    variant rounds up.
    """
    schedule = schedule or AttemptSchedule()
    if n_modes <= 0 or t_measure < 0 or pairs_needed < 0:
        raise ValueError("invalid cycle parameters")
    return CycleBudget(
        init_time=init_time,
        scan_time=scan_time(schedule),
        local_gate_time=local_gate_time,
        measurement_time=pairs_needed / n_modes * t_measure,
        measurement_time_worst=math.ceil(pairs_needed / n_modes) * t_measure,
    )


def free_space_baseline(rate_per_qubit: float = 250.0, n_comm_qubits: int = 1) -> float:
    if rate_per_qubit < 0 or n_comm_qubits < 0:
        raise ValueError("inputs must be non-negative")
    return rate_per_qubit * n_comm_qubits


def write_row_csv(path, row: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(row))
        w.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])


def budget_row(budget: CycleBudget) -> dict:
    row = asdict(budget)
    row["total"] = budget.total
    row["total_worst"] = budget.total_worst
    return row
