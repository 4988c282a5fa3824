"""Benchmark configuration: nested dataclasses loaded from YAML.

Unknown keys are rejected with the dotted path of the offending field.

Example (the temporal benchmark used for the desk-scale experiments)::

    seed: 42
    shape:
      n: 150
      aspects:
        - {size: 100, ordered: true}
    dependency:
      kind: temporal          # temporal | uniform_multiplex | temporal_multiplex | block_multiplex | custom
      p: 0.95                 # scalar, or a list p_2..p_l
      change_layers: []       # 1-based layers whose copy probability is p_change
      p_change: 0.0
    null_model:
      n_c: 5
      theta: 1.0
      shared: false
      support: {kind: full}   # or temporal_birth_death (r_d, r_b, initial_size) / multiplex_presence (q_presence)
    sampler:
      iterations: null        # null: 1 sweep if every aspect is ordered, 200 otherwise
      chains: 1
    edges:
      exponent: -2            # density proportional to x**exponent
      k_min: 3
      k_max: 30
      mu: 0.4
    sweep:                    # only read by the sweep subcommand
      mu: [0.0, 0.4, 0.8]
      omega: [0.0, 2.0]
      rule: [max_gain, proportional_gain]
      runs: 10
      topology: ordinal
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from .core import AspectSpec, LayerDependencyTensor, MultilayerShape
from .dependency import (
    build_block_multiplex,
    build_custom,
    build_temporal,
    build_temporal_multiplex,
    build_uniform_multiplex,
)
from .detection import MoveRule, Topology
from .nulldist import SupportProcessSpec
from .partitions import SamplerConfig
from .seeding import check_seed

DEPENDENCY_KINDS = ("temporal", "uniform_multiplex", "temporal_multiplex", "block_multiplex", "custom")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the dotted field path."""


@dataclass(frozen=True)
class ShapeConfig:
    n: int
    aspects: tuple

    def build(self) -> MultilayerShape:
        return MultilayerShape(self.n, tuple(AspectSpec(a["size"], a.get("ordered", False)) for a in self.aspects))


@dataclass(frozen=True)
class DependencyConfig:
    kind: str = "temporal"
    p: Any = None
    p_hat: Any = None
    change_layers: tuple = ()
    p_change: float = 0.0
    blocks: tuple | None = None
    matrix: Any = None


@dataclass(frozen=True)
class SupportConfig:
    kind: str = "full"
    r_d: float = 0.0
    r_b: float = 0.0
    initial_size: int = 1
    q_presence: float = 1.0


@dataclass(frozen=True)
class NullConfig:
    n_c: int | None = None
    theta: float = 1.0
    shared: bool = False
    support: SupportConfig = field(default_factory=SupportConfig)


@dataclass(frozen=True)
class SamplerSection:
    iterations: int | None = None
    chains: int = 1


@dataclass(frozen=True)
class EdgeConfig:
    exponent: float = -2.0
    k_min: float = 3.0
    k_max: float = 30.0
    mu: float = 0.0


@dataclass(frozen=True)
class SweepConfig:
    mu: tuple = (0.0,)
    omega: tuple = (0.0,)
    rule: tuple = ("max_gain", "proportional_gain")
    runs: int = 10
    topology: str = "ordinal"


@dataclass(frozen=True)
class BenchmarkConfig:
    shape: ShapeConfig
    dependency: DependencyConfig
    null_model: NullConfig
    sampler: SamplerSection = field(default_factory=SamplerSection)
    edges: EdgeConfig = field(default_factory=EdgeConfig)
    sweep: SweepConfig | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))

    def with_seed(self, seed: int) -> "BenchmarkConfig":
        return dataclasses.replace(self, seed=check_seed(seed))

    def build_shape(self) -> MultilayerShape:
        return self.shape.build()

    def build_dependency(self) -> LayerDependencyTensor:
        return build_dependency(self.dependency, self.build_shape())

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(self.sampler.iterations, self.sampler.chains, self.seed)

    def support_spec(self) -> SupportProcessSpec:
        return SupportProcessSpec(**dataclasses.asdict(self.null_model.support))


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def _section(cls, data, path, nested=None):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError(f"{path}.{key}: unknown key")
    kwargs = {}
    for key, value in data.items():
        if nested and key in nested:
            value = nested[key](value, f"{path}.{key}")
        elif isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _number(value, path, kind=float, low=None, high=None, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    value = kind(value)
    if low is not None and value < low:
        raise ConfigError(f"{path}: must be >= {low}, got {value}")
    if high is not None and value > high:
        raise ConfigError(f"{path}: must be <= {high}, got {value}")
    return value


def _shape(data, path):
    cfg = _section(ShapeConfig, data, path)
    _number(cfg.n, f"{path}.n", int, 1)
    if not cfg.aspects:
        raise ConfigError(f"{path}.aspects: need at least one aspect")
    for k, a in enumerate(cfg.aspects):
        if not isinstance(a, dict) or set(a) - {"size", "ordered"} or "size" not in a:
            raise ConfigError(f"{path}.aspects[{k}]: expected {{size, ordered}}")
        _number(a["size"], f"{path}.aspects[{k}].size", int, 1)
        if not isinstance(a.get("ordered", False), bool):
            raise ConfigError(f"{path}.aspects[{k}].ordered: expected true or false")
    return ShapeConfig(int(cfg.n), tuple(dict(size=int(a["size"]), ordered=bool(a.get("ordered", False)))
                                         for a in cfg.aspects))


def _dependency(data, path):
    cfg = _section(DependencyConfig, data, path)
    if cfg.kind not in DEPENDENCY_KINDS:
        raise ConfigError(f"{path}.kind: must be one of {', '.join(DEPENDENCY_KINDS)}, got {cfg.kind!r}")
    return cfg


def _null(data, path):
    cfg = _section(NullConfig, data, path,
                   {"support": lambda v, p: _section(SupportConfig, v, p)})
    _number(cfg.theta, f"{path}.theta", float)
    if cfg.theta <= 0:
        raise ConfigError(f"{path}.theta: must be positive, got {cfg.theta}")
    _number(cfg.n_c, f"{path}.n_c", int, 1, allow_none=True)
    try:
        SupportProcessSpec(**dataclasses.asdict(cfg.support))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}.support: {exc}") from None
    return cfg


def _edges(data, path):
    cfg = _section(EdgeConfig, data, path)
    _number(cfg.exponent, f"{path}.exponent")
    if -cfg.exponent <= 1:
        raise ConfigError(f"{path}.exponent: density x**exponent needs exponent < -1, got {cfg.exponent}")
    _number(cfg.k_min, f"{path}.k_min", float, 0)
    _number(cfg.k_max, f"{path}.k_max", float, cfg.k_min)
    if cfg.k_min <= 0:
        raise ConfigError(f"{path}.k_min: must be positive")
    _number(cfg.mu, f"{path}.mu", float, 0, 1)
    return cfg


def _sampler(data, path):
    cfg = _section(SamplerSection, data, path)
    _number(cfg.iterations, f"{path}.iterations", int, 1, allow_none=True)
    _number(cfg.chains, f"{path}.chains", int, 1)
    return cfg


def _sweep(data, path):
    if data is None:
        return None
    cfg = _section(SweepConfig, data, path)
    for name in ("mu", "omega", "rule"):
        if not isinstance(getattr(cfg, name), tuple) or not getattr(cfg, name):
            raise ConfigError(f"{path}.{name}: expected a nonempty list")
    for k, mu in enumerate(cfg.mu):
        _number(mu, f"{path}.mu[{k}]", float, 0, 1)
    for k, om in enumerate(cfg.omega):
        _number(om, f"{path}.omega[{k}]", float, 0)
    for k, rule in enumerate(cfg.rule):
        try:
            MoveRule(rule)
        except ValueError:
            raise ConfigError(f"{path}.rule[{k}]: unknown rule {rule!r}") from None
    try:
        Topology(cfg.topology)
    except ValueError:
        raise ConfigError(f"{path}.topology: must be ordinal or categorical") from None
    _number(cfg.runs, f"{path}.runs", int, 1)
    return cfg


def parse_config(data: dict) -> BenchmarkConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a mapping at the top level")
    for required in ("shape", "dependency", "null_model"):
        if required not in data:
            raise ConfigError(f"{required}: missing section")
    cfg = _section(BenchmarkConfig, data, "config", {
        "shape": _shape, "dependency": _dependency, "null_model": _null,
        "sampler": _sampler, "edges": _edges, "sweep": _sweep,
        "seed": lambda v, p: _seed(v, p),
    })
    # building the pieces once surfaces every validation error up front
    shape = cfg.build_shape()
    build_dependency(cfg.dependency, shape)
    if cfg.null_model.support.kind != "temporal_birth_death" and cfg.null_model.n_c is None:
        raise ConfigError("null_model.n_c: required unless the support process is temporal_birth_death")
    if cfg.null_model.n_c is not None and cfg.null_model.n_c > shape.n_state_nodes:
        raise ConfigError(f"null_model.n_c: {cfg.null_model.n_c} labels exceed {shape.n_state_nodes} state nodes")
    return cfg


def _seed(value, path):
    try:
        return check_seed(value)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_config(path) -> BenchmarkConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config: cannot parse YAML ({exc})") from None
    return parse_config(data)


def _layer_list(values, l, path):
    out = []
    for k, b in enumerate(values):
        b = _number(b, f"{path}[{k}]", int, 2, l)
        out.append(b)
    return out


def build_dependency(cfg: DependencyConfig, shape: MultilayerShape) -> LayerDependencyTensor:
    """Dependency tensor described by ``cfg`` for ``shape``; raises :class:`ConfigError`."""
    path = "dependency"
    sizes = shape.sizes
    ordered = [a.ordered for a in shape.aspects]
    try:
        if cfg.kind == "temporal":
            if len(sizes) != 1 or not ordered[0]:
                raise ConfigError(f"{path}.kind: temporal needs a single ordered aspect")
            if cfg.p is None:
                raise ConfigError(f"{path}.p: required for temporal dependencies")
            l = sizes[0]
            p = np.asarray(cfg.p, dtype=float)
            p = np.full(l - 1, float(p)) if p.ndim == 0 else p
            for b in _layer_list(cfg.change_layers, l, f"{path}.change_layers"):
                if p.shape == (l - 1,):
                    p[b - 2] = cfg.p_change
            return build_temporal(l, p, shape.n)
        if cfg.kind == "uniform_multiplex":
            if len(sizes) != 1 or ordered[0]:
                raise ConfigError(f"{path}.kind: uniform_multiplex needs a single unordered aspect")
            if cfg.p_hat is None:
                raise ConfigError(f"{path}.p_hat: required for uniform_multiplex dependencies")
            return build_uniform_multiplex(sizes[0], cfg.p_hat, shape.n)
        if cfg.kind == "temporal_multiplex":
            if len(sizes) != 2 or ordered != [False, True]:
                raise ConfigError(f"{path}.kind: temporal_multiplex needs aspects (unordered, ordered)")
            if cfg.p is None:
                raise ConfigError(f"{path}.p: required for temporal_multiplex dependencies")
            return build_temporal_multiplex(sizes[0], sizes[1], cfg.p, shape.n)
        if cfg.kind == "block_multiplex":
            if len(sizes) != 1 or ordered[0]:
                raise ConfigError(f"{path}.kind: block_multiplex needs a single unordered aspect")
            if cfg.blocks is None or cfg.p_hat is None:
                raise ConfigError(f"{path}: block_multiplex needs blocks and p_hat")
            return build_block_multiplex(sizes[0], list(cfg.blocks), cfg.p_hat, shape.n)
        if cfg.matrix is None:
            raise ConfigError(f"{path}.matrix: required for custom dependencies")
        return build_custom(shape, np.asarray(cfg.matrix, dtype=float))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
