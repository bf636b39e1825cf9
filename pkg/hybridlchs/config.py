"""
Experiment configuration: YAML files merged over the packaged defaults and parsed into
frozen dataclasses. Unknown keys are rejected with their full key path.
"""

import copy
import dataclasses
import importlib.resources
import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
import yaml

from .utils import ValidationError

logger = logging.getLogger(__name__)

BENCHMARKS = ("heat-dirichlet", "heat-neumann", "heat-periodic", "damped-osc", "custom")
PREP_METHODS = ("inject", "le", "snapd")
EVOLUTIONS = ("trotter", "exact")
CIRCUITS = ("gate", "frame")


@dataclass(frozen=True)
class BenchmarkConfig:
    name: str = "heat-dirichlet"
    dims: List[int] = field(default_factory=lambda: [2])
    alpha: float = 1.0
    h: float = 1.0
    zeta: float = 0.5
    kappa: float = 1.0
    generator_file: Optional[str] = None
    u0: Union[int, List] = 1
    t: float = 1.0

    @property
    def bc(self) -> Optional[str]:
        return self.name.split("-", 1)[1] if self.name.startswith("heat-") else None


@dataclass(frozen=True)
class KernelConfig:
    beta: float = 0.5
    r: float = 7.9
    r_prime: float = 4.1
    n_trunc: int = 48
    tol: float = 1e-12
    domain_radius: Optional[float] = None
    truncation_n: List[int] = field(default_factory=lambda: [8, 16, 32, 64])


@dataclass(frozen=True)
class SimulationConfig:
    n_fock: int = 64
    n_t: int = 100
    order: int = 1
    evolution: str = "trotter"
    prep_method: str = "le"
    circuit: str = "gate"
    postselection_floor: float = 1e-8


@dataclass(frozen=True)
class StatePrepConfig:
    layers: int = 30
    budget: int = 2000
    n_starts: int = 4
    alpha_scale: float = 0.3
    cache_dir: Optional[str] = None


@dataclass(frozen=True)
class DvConfig:
    eps: float = 0.1
    eta: float = 1.0
    beta_grid: List[float] = field(default_factory=lambda: [0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95])
    T: Optional[float] = None


@dataclass(frozen=True)
class SweepConfig:
    r: List[float] = field(default_factory=lambda: [7.9])
    r_prime: List[float] = field(default_factory=lambda: [4.1])
    beta: List[float] = field(default_factory=lambda: [0.5])
    n_trunc: List[int] = field(default_factory=lambda: [48])


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "outfiles"
    report: str = "report.json"
    csv: Optional[str] = None
    gates_jsonl: Optional[str] = None


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: BenchmarkConfig = field(default_factory=BenchmarkConfig)
    kernel: KernelConfig = field(default_factory=KernelConfig)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    stateprep: StatePrepConfig = field(default_factory=StatePrepConfig)
    dv: DvConfig = field(default_factory=DvConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 1234

    def to_dict(self):
        return dataclasses.asdict(self)

    def replace(self, **sections) -> "ExperimentConfig":
        return dataclasses.replace(self, **sections)


def _build(cls, data, path: str):
    if not isinstance(data, dict):
        raise ValidationError(f"{path or 'config'} must be a mapping, got {type(data).__name__}")
    kwargs = {}
    known = {f.name: f for f in dataclasses.fields(cls)}
    for key, value in data.items():
        key_path = f"{path}.{key}" if path else key
        if key not in known:
            raise ValidationError(f"unknown config key {key_path!r}")
        ftype = known[key].type
        if dataclasses.is_dataclass(ftype):
            value = _build(ftype, value, key_path)
        kwargs[key] = value
    return cls(**kwargs)


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def default_config_dict() -> dict:
    with importlib.resources.path("hybridlchs.data", "default_config.yaml") as path:
        with open(path) as f:
            return yaml.safe_load(f)


def _require(cond: bool, msg: str):
    if not cond:
        raise ValidationError(msg)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Range and reference checks run before anything is computed."""
    b, k, s, p, dv, sw = cfg.benchmark, cfg.kernel, cfg.simulation, cfg.stateprep, cfg.dv, cfg.sweep
    _require(b.name in BENCHMARKS, f"benchmark.name must be one of {BENCHMARKS}, got {b.name!r}")
    if b.bc is not None:
        _require(len(b.dims) > 0 and all(int(m) >= 2 for m in b.dims), f"benchmark.dims must list qubit counts >= 2, got {b.dims}")
        _require(b.alpha > 0 and b.h > 0, "benchmark.alpha and benchmark.h must be positive")
    if b.name == "custom":
        _require(b.generator_file is not None, "benchmark.generator_file is required for a custom benchmark")
        _require(os.path.exists(b.generator_file), f"generator file {b.generator_file!r} does not exist")
    _require(b.t >= 0, f"benchmark.t must be non-negative, got {b.t}")
    _require(0 < k.beta < 1, f"kernel.beta must lie in (0, 1), got {k.beta}")
    _require(0 <= k.r_prime < k.r, f"need 0 <= kernel.r_prime < kernel.r, got {k.r_prime}, {k.r}")
    _require(int(k.n_trunc) >= 1, f"kernel.n_trunc must be >= 1, got {k.n_trunc}")
    _require(k.tol > 0, "kernel.tol must be positive")
    _require(len(k.truncation_n) > 0 and min(k.truncation_n) >= 1, "kernel.truncation_n must list positive integers")
    _require(s.n_fock >= k.n_trunc, f"simulation.n_fock={s.n_fock} must hold kernel.n_trunc={k.n_trunc} levels")
    _require(s.n_t >= 1, f"simulation.n_t must be >= 1, got {s.n_t}")
    _require(s.order in (1, 2), f"simulation.order must be 1 or 2, got {s.order}")
    _require(s.evolution in EVOLUTIONS, f"simulation.evolution must be one of {EVOLUTIONS}")
    _require(s.prep_method in PREP_METHODS, f"simulation.prep_method must be one of {PREP_METHODS}")
    _require(s.circuit in CIRCUITS, f"simulation.circuit must be one of {CIRCUITS}")
    _require(s.postselection_floor > 0, "simulation.postselection_floor must be positive")
    _require(p.layers >= 1 and p.budget >= 1 and p.n_starts >= 1, "stateprep layers, budget and n_starts must be >= 1")
    _require(0 < dv.eps < 1 and dv.eta > 0, f"need 0 < dv.eps < 1 and dv.eta > 0, got {dv.eps}, {dv.eta}")
    _require(len(dv.beta_grid) > 0, "dv.beta_grid is empty")
    _require(all(0 < x < 1 for x in dv.beta_grid), f"dv.beta_grid must lie in (0, 1), got {dv.beta_grid}")
    for name in ("r", "r_prime", "beta", "n_trunc"):
        _require(len(getattr(sw, name)) > 0, f"sweep.{name} grid is empty")
    _require(isinstance(cfg.seed, (int, np.integer)) and cfg.seed >= 0, f"seed must be a non-negative integer, got {cfg.seed}")
    return cfg


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """
    Packaged defaults, then the YAML file at ``path``, then ``overrides`` (e.g. command-line
    flags), merged in that order and validated.
    """
    data = default_config_dict()
    if path is not None:
        if not os.path.exists(path):
            raise ValidationError(f"config file {path!r} does not exist")
        with open(path) as f:
            user = yaml.safe_load(f) or {}
        if not isinstance(user, dict):
            raise ValidationError(f"config file {path!r} must hold a mapping")
        data = deep_merge(data, user)
    if overrides:
        data = deep_merge(data, overrides)
    cfg = _build(ExperimentConfig, data, "")
    logger.debug(f"effective config: {cfg}")
    return validate(cfg)


def dump_config(cfg: ExperimentConfig, path: str):
    with open(path, "w") as f:
        yaml.safe_dump(cfg.to_dict(), f, sort_keys=False)
