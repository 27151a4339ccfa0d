"""Strict YAML design configs: one dataclass per block, unknown keys rejected.

Physical constants carry no defaults; only plumbing fields (grids, solver
settings, output formats) may be omitted.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import typing
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import yaml


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CavityBlock:
    length: float
    wavelength: float
    finesse: float
    mirror_loss_total: float
    family: str
    max_index: int
    waist_w0: Optional[float] = None
    gouy_fold: Optional[list] = None
    grid_tolerance: float = 1e6

    def validate(self):
        if (self.waist_w0 is None) == (self.gouy_fold is None):
            raise ConfigError("cavity: give exactly one of waist_w0 or gouy_fold")
        if self.family not in ("HG", "LG"):
            raise ConfigError("cavity.family must be HG or LG")
        if self.gouy_fold is not None and len(self.gouy_fold) != 2:
            raise ConfigError("cavity.gouy_fold must be [numerator, denominator]")


@dataclass(frozen=True)
class LevelsBlock:
    gamma_e: float
    gamma_f: float
    branching: dict
    leak_probability: float = 0.0


@dataclass(frozen=True)
class DressingBlock:
    max_shift: float
    n_fsr: int
    reference_offset: float
    intensity_stability: float
    control_beam_waist: float
    exclude_control_crosstalk: bool


@dataclass(frozen=True)
class ArrayBlock:
    design: str
    spacing_z: float
    min_spacing: float
    temperature: float
    trap_frequency_radial: float
    branching_factor: float
    n_atoms: Optional[int] = None
    n_registers: Optional[int] = None
    n_transverse: Optional[int] = None
    atoms_per_column: Optional[int] = None
    registers_per_column: Optional[int] = None

    def validate(self):
        need = {
            "LG_CHAIN": ("n_atoms", "n_registers"),
            "HG_READOUT": ("n_transverse", "atoms_per_column", "registers_per_column"),
        }
        if self.design not in need:
            raise ConfigError(f"array.design must be one of {sorted(need)}")
        missing = [k for k in need[self.design] if getattr(self, k) is None]
        if missing:
            raise ConfigError(f"array: {self.design} needs {missing}")


@dataclass(frozen=True)
class SearchBlock:
    n_atoms: int
    n_batch: int
    n_modes: int
    p_synd: float
    t_query: float
    free_space_time: float
    n_grid: list = field(default_factory=lambda: [256, 512, 1024, 2048, 3000, 4000, 5000, 6400])
    mc_trials: int = 2000


@dataclass(frozen=True)
class LinkBlock:
    eta: float
    kappa_e: float
    kappa_i: float
    alpha_setup: float
    n_modes: int
    attempt_period: float
    mean_p_success: float
    n_registers: int
    atoms_per_register: int
    switching_time: float
    photon_window: float
    pairs_needed: int
    t_measure: float
    init_time: float
    local_gate_time: float


@dataclass(frozen=True)
class DynamicsBlock:
    eta: float
    slope: float
    duration: float
    compare_slope: float
    compare_duration: float
    delta_atom: float = 0.0
    delta_cav: float = 0.0
    fock_cutoff: int = 1
    polarization_resolved: bool = False
    eta_sweep: list = field(default_factory=lambda: [1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0])
    n_points: int = 401
    rtol: float = 1e-10
    atol: float = 1e-12


@dataclass(frozen=True)
class OutputBlock:
    seed: Optional[int] = None
    formats: list = field(default_factory=lambda: ["csv", "svg"])


BLOCKS = {
    "cavity": CavityBlock,
    "levels": LevelsBlock,
    "dressing": DressingBlock,
    "array": ArrayBlock,
    "search": SearchBlock,
    "link": LinkBlock,
    "dynamics": DynamicsBlock,
    "output": OutputBlock,
}


@dataclass(frozen=True)
class DesignConfig:
    cavity: Optional[CavityBlock] = None
    levels: Optional[LevelsBlock] = None
    dressing: Optional[DressingBlock] = None
    array: Optional[ArrayBlock] = None
    search: Optional[SearchBlock] = None
    link: Optional[LinkBlock] = None
    dynamics: Optional[DynamicsBlock] = None
    output: OutputBlock = field(default_factory=OutputBlock)
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError(f"config lacks required block(s): {', '.join(missing)}")

    def hash(self) -> str:
        return config_hash(self.raw)


def _number_or_text(v):
    # YAML 1.1 reads exponents without a dot (``10e-6``) as strings
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            return v
    return v


def _coerce(value, hint, where: str):
    origin = typing.get_origin(hint)
    if origin is typing.Union:
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], where)
    if value is None:
        raise ConfigError(f"{where} must not be null")
    try:
        if hint is bool:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if hint is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if hint is float:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if hint is str:
            if not isinstance(value, str):
                raise TypeError
            return value
        if hint is list:
            if not isinstance(value, list):
                raise TypeError
            return [_number_or_text(v) for v in value]
        if hint is dict:
            if not isinstance(value, dict):
                raise TypeError
            return {str(k): float(v) for k, v in value.items()}
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: cannot read {value!r} as {getattr(hint, '__name__', hint)}") from None
    return value


def _build_block(cls, data, name: str):
    if not isinstance(data, dict):
        raise ConfigError(f"block {name!r} must be a mapping")
    hints = typing.get_type_hints(cls)
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {name}: {', '.join(unknown)}")
    kwargs = {}
    for fname, f in known.items():
        if fname in data:
            kwargs[fname] = _coerce(data[fname], hints[fname], f"{name}.{fname}")
        elif f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
            raise ConfigError(f"missing required key {name}.{fname}")
    block = cls(**kwargs)
    if hasattr(block, "validate"):
        block.validate()
    return block


def parse_config(data: dict) -> DesignConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    unknown = sorted(set(data) - set(BLOCKS))
    if unknown:
        raise ConfigError(f"unknown block(s): {', '.join(unknown)}")
    blocks = {name: _build_block(BLOCKS[name], body, name) for name, body in data.items()}
    return DesignConfig(**blocks, raw=data)


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``block.key=value`` strings; values are parsed as YAML scalars."""
    out = json.loads(json.dumps(data))
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key {key!r} must be block.field")
        block, fname = parts
        if block not in BLOCKS:
            raise ConfigError(f"unknown block {block!r} in override")
        if fname not in {f.name for f in dataclasses.fields(BLOCKS[block])}:
            raise ConfigError(f"unknown key {key!r} in override")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse override value {text!r}: {exc}") from None
        out.setdefault(block, {})[fname] = value
    return out


def load_config(path, overrides=None) -> DesignConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return parse_config(apply_overrides(data or {}, overrides))


def config_hash(data: dict) -> str:
    """SHA-256 of the canonical JSON form; insensitive to key order."""
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


def shipped_config(name: str) -> Path:
    """Path of a reference config bundled with the package (``table1_readout`` or ``table2_link``)."""
    path = resources.files("cmm") / "configs" / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(f"no shipped config named {name!r}")
    return Path(str(path))
