"""Multiplexed adaptive syndrome extraction: query-count model and Monte Carlo.

Each batch runs a global check; a positive check starts a binary search
that decouples halves (left half tested first, ceil/floor split) until one
faulty atom is isolated, which is then decoupled before the next global
check.  Batch b is handled by mode ``b % n_modes``; modes advance in
lockstep rounds of ``t_query``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class SearchConfig:
    n_atoms: int
    n_batch: int = 256
    n_modes: int = 1
    p_synd: float = 5e-3
    t_query: float = 10e-6
    free_space_time: float = 5e-3
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_atoms < 0:
            raise ValueError("n_atoms must be non-negative")
        if self.n_batch < 1 or self.n_modes < 1:
            raise ValueError("n_batch and n_modes must be at least 1")
        if not 0.0 <= self.p_synd <= 1.0:
            raise ValueError("p_synd must be a probability")
        if self.t_query <= 0:
            raise ValueError("t_query must be positive")

    @property
    def batch_size(self) -> int:
        return batch_policy(self.n_batch, self.n_atoms, self.n_modes)

    @property
    def n_batches(self) -> int:
        return math.ceil(self.n_atoms / self.batch_size) if self.n_atoms else 0

    def batch_bounds(self, b: int) -> tuple[int, int]:
        lo = b * self.batch_size
        return lo, min(lo + self.batch_size, self.n_atoms)


def batch_policy(n_batch_max: int, n_atoms: int, n_modes: int) -> int:
    """Effective batch size min(n_batch_max, ceil(N / n_modes))."""
    return max(1, min(n_batch_max, math.ceil(n_atoms / n_modes)))


def expected_queries_per_batch(n_batch: float, p_synd: float) -> float:
    if n_batch <= 0:
        raise ValueError("n_batch must be positive")
    return 1 + n_batch * p_synd * (1 + math.log2(n_batch))


def total_steps(n_atoms: int, n_batch: int, n_modes: int, p_synd: float) -> float:
    """Expected sequential query rounds: ceil(N / (n_batch n_modes)) * m."""
    rounds = math.ceil(n_atoms / (n_batch * n_modes))
    return rounds * expected_queries_per_batch(n_batch, p_synd)


def analytic_time(cfg: SearchConfig) -> float:
    return total_steps(cfg.n_atoms, cfg.batch_size, cfg.n_modes, cfg.p_synd) * cfg.t_query


@lru_cache(maxsize=None)
def _leaf_depths(n: int) -> tuple[int, ...]:
    if n == 1:
        return (0,)
    left = (n + 1) // 2
    return tuple(d + 1 for d in _leaf_depths(left) + _leaf_depths(n - left))


def leaf_depths(n: int) -> np.ndarray:
    """Number of search queries needed to isolate each position of an n-atom batch."""
    if n < 1:
        raise ValueError("batch must hold at least one atom")
    return np.array(_leaf_depths(n), dtype=np.int64)


@dataclass(frozen=True)
class QueryEvent:
    time: float
    mode_id: int
    register_id: int
    subset: str
    outcome: str


@dataclass
class QueryTrace:
    events: list[QueryEvent]
    total_queries: int
    total_time: float
    identified_faults: frozenset
    planted_faults: frozenset = field(default_factory=frozenset)

    @property
    def complete(self) -> bool:
        return self.identified_faults == self.planted_faults

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "mode", "register", "subset", "outcome"])
            for e in self.events:
                w.writerow([repr(e.time), e.mode_id, e.register_id, e.subset, e.outcome])


def search_batch(lo: int, hi: int, faulty) -> tuple[list[tuple[str, bool]], list[int]]:
    """Run the adaptive protocol on atoms [lo, hi); ``faulty`` supports ``in``.

    Returns the ordered (subset, positive) queries and the identified atoms.
    """
    queries: list[tuple[str, bool]] = []
    found: list[int] = []
    decoupled: set[int] = set()

    def probe(a, b):
        return any(i in faulty and i not in decoupled for i in range(a, b))

    while True:
        positive = probe(lo, hi)
        queries.append((f"global[{lo}:{hi}]", positive))
        if not positive:
            return queries, found
        a, b = lo, hi
        while b - a > 1:
            mid = a + (b - a + 1) // 2
            positive = probe(a, mid)
            queries.append((f"half[{a}:{mid}]", positive))
            if positive:
                b = mid
            else:
                a = mid
        found.append(a)
        decoupled.add(a)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def sample_faults(cfg: SearchConfig, trial: int = 0) -> np.ndarray:
    """Sorted faulty-atom indices; each atom faulty independently with p_synd."""
    rng = trial_rng(cfg.rng_seed, trial)
    k = rng.binomial(cfg.n_atoms, cfg.p_synd)
    return np.sort(rng.choice(cfg.n_atoms, size=k, replace=False))


def simulate_extraction(cfg: SearchConfig, planted_faults=None, trial: int = 0) -> QueryTrace:
    """Event-level simulation; faults are drawn from the (seed, trial) stream unless planted."""
    if planted_faults is None:
        planted = frozenset(int(i) for i in sample_faults(cfg, trial))
    else:
        planted = frozenset(int(i) for i in planted_faults)
        if any(not 0 <= i < cfg.n_atoms for i in planted):
            raise ValueError("planted fault outside the array")
    events: list[QueryEvent] = []
    identified: set[int] = set()
    clock = [0] * cfg.n_modes
    for b in range(cfg.n_batches):
        mode = b % cfg.n_modes
        lo, hi = cfg.batch_bounds(b)
        queries, found = search_batch(lo, hi, planted)
        identified.update(found)
        for subset, positive in queries:
            events.append(QueryEvent(clock[mode] * cfg.t_query, mode, b, subset, "positive" if positive else "negative"))
            clock[mode] += 1
    events.sort(key=lambda e: (e.time, e.mode_id))
    rounds = max(clock) if clock else 0
    return QueryTrace(events, len(events), rounds * cfg.t_query, frozenset(identified), planted)


def batch_query_counts(cfg: SearchConfig, faults: np.ndarray) -> np.ndarray:
    """Per-batch query counts, 1 + sum over faults of (leaf depth + 1)."""
    nb, size = cfg.n_batches, cfg.batch_size
    counts = np.ones(nb, dtype=np.int64)
    if len(faults) == 0:
        return counts
    batch = faults // size
    local = faults - batch * size
    full = leaf_depths(size) + 1
    cost = full[np.minimum(local, size - 1)]
    last = cfg.n_atoms - (nb - 1) * size
    if last != size:
        tail = batch == nb - 1
        cost[tail] = (leaf_depths(last) + 1)[local[tail]]
    counts += np.bincount(batch, weights=cost, minlength=nb).astype(np.int64)
    return counts


def trial_time(cfg: SearchConfig, faults: np.ndarray) -> float:
    counts = batch_query_counts(cfg, faults)
    per_mode = np.bincount(np.arange(len(counts)) % cfg.n_modes, weights=counts, minlength=cfg.n_modes)
    return float(per_mode.max()) * cfg.t_query if len(counts) else 0.0


@dataclass(frozen=True)
class MonteCarloResult:
    times: np.ndarray
    mode_busy: np.ndarray

    @property
    def mean(self) -> float:
        return math.fsum(self.times) / len(self.times)

    @property
    def std(self) -> float:
        return float(np.std(self.times, ddof=1)) if len(self.times) > 1 else 0.0

    @property
    def mean_mode_busy(self) -> float:
        """Average per-mode busy time; the makespan minus idle waiting."""
        return math.fsum(self.mode_busy) / len(self.mode_busy)


def monte_carlo(cfg: SearchConfig, n_trials: int) -> MonteCarloResult:
    """Total extraction time (lockstep makespan) over independent seeded trials."""
    times = np.empty(n_trials)
    busy = np.empty(n_trials)
    modes = np.arange(cfg.n_batches) % cfg.n_modes
    n_active = min(cfg.n_modes, cfg.n_batches)
    for t in range(n_trials):
        counts = batch_query_counts(cfg, sample_faults(cfg, t))
        per_mode = np.bincount(modes, weights=counts, minlength=cfg.n_modes)
        times[t] = per_mode.max() * cfg.t_query
        busy[t] = per_mode.sum() / max(n_active, 1) * cfg.t_query
    return MonteCarloResult(times, busy)


@dataclass(frozen=True)
class ScalingPoint:
    n_atoms: int
    variant: str
    mean_time: float
    std_time: float = 0.0


def scaling_report(
    n_grid, base: SearchConfig, variants=("free_space", "single_mode", "multimode"), mc_trials: int = 0
) -> list[ScalingPoint]:
    """Readout duration vs N for free-space imaging, one cavity mode and ``base.n_modes`` modes."""
    n_grid = list(n_grid)
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("N grid must be non-empty and ascending")
    out = []
    for n in n_grid:
        for v in variants:
            if v == "free_space":
                out.append(ScalingPoint(n, v, base.free_space_time))
                continue
            modes = 1 if v == "single_mode" else base.n_modes
            cfg = replace(base, n_atoms=n, n_modes=modes)
            out.append(ScalingPoint(n, v, analytic_time(cfg)))
            if mc_trials:
                mc = monte_carlo(cfg, mc_trials)
                out.append(ScalingPoint(n, v + "_mc", mc.mean, mc.std))
    return out


def write_scaling_csv(path, points: list[ScalingPoint]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "variant", "mean_time_s", "std_time_s"])
        for p in points:
            w.writerow([p.n_atoms, p.variant, repr(p.mean_time), repr(p.std_time)])
