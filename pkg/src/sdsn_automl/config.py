"""Scenario configuration: dataclasses loaded from YAML.

Validation errors carry the dotted path of the offending field, e.g.
``defense.mode: must be one of none, greedy, automl``.
"""

from __future__ import annotations

import dataclasses
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .datasets import BaselineConfig
from .ml import ALGORITHMS
from .sim.links import LinkParams
from .sim.topology import (DEFAULT_ACCESS, DEFAULT_CONTROL, DEFAULT_TRUNK, TopologySpec,
                           minimal_spec, scaling_spec, edge_core_spec)
from .traffic import PAYLOAD_CLASSES, SPEED_CLASSES

DEFENSE_MODES = ("none", "greedy", "automl")


class ConfigError(ValueError):
    pass


@dataclass
class LinkConfig:
    propagation_delay_us: int
    capacity_pps: int
    queue_capacity: int

    def params(self) -> LinkParams:
        return LinkParams(self.propagation_delay_us, self.capacity_pps, self.queue_capacity)

    @classmethod
    def of(cls, p: LinkParams) -> "LinkConfig":
        return cls(p.propagation_delay_us, p.capacity_pps, p.queue_capacity)


@dataclass
class TopologyConfig:
    preset: str = "testbed"
    n_sensors: int = 8
    node_count: int = 100
    n_hosts: int = 4
    access: LinkConfig = field(default_factory=lambda: LinkConfig.of(DEFAULT_ACCESS))
    trunk: LinkConfig = field(default_factory=lambda: LinkConfig.of(DEFAULT_TRUNK))
    control: LinkConfig = field(default_factory=lambda: LinkConfig.of(DEFAULT_CONTROL))
    target: LinkConfig | None = None

    def spec(self) -> TopologySpec:
        if self.preset == "testbed":
            return edge_core_spec(self.n_sensors, self.access.params(), self.trunk.params(),
                                self.target.params() if self.target else None, self.control.params())
        if self.preset == "scaling":
            return scaling_spec(self.node_count, self.n_hosts, self.access.params(), self.control.params())
        if self.preset == "minimal":
            return minimal_spec(self.access.params())
        raise ConfigError(f"topology.preset: unknown preset {self.preset!r}")


@dataclass
class FlowConfig:
    src: str
    dst: str
    payload: str = "small"
    speed: str = "low"
    start_s: float = 0.0
    stop_s: float | None = None


@dataclass
class AttackConfig:
    target: str
    bots: list[str]
    payload: str = "small"
    speed: str = "fast"
    start_s: float = 20.0
    stop_s: float = 80.0


@dataclass
class ProbeConfig:
    src: str = "h6"
    dst: str = "h1"
    interval_s: float = 1.0
    timeout_s: float = 10.0


@dataclass
class DefenseConfig:
    mode: str = "automl"
    hold_down_s: float = 30.0
    greedy_threshold_pps: float = 1000.0
    greedy_hold_down_s: float = 1.0


@dataclass
class BootstrapConfig:
    source: str = "generate"  # generate | dir | none
    datasets_dir: str | None = None
    cell: list[str] | None = None  # [payload, speed]; None -> class of the configured normal traffic
    baseline: BaselineConfig = field(default_factory=BaselineConfig)


@dataclass
class AutoMLConfig:
    buffer_s: float = 120.0
    alpha: float = 0.7
    beta: float = 0.3
    calibration: str = "global"
    timing: str = "cost"  # cost | wall
    seconds_per_op: float = 1e-8
    hyperparameters: dict[str, dict[str, Any]] = field(default_factory=dict)
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    seed: int = 1
    duration_s: float = 100.0
    poll_interval_s: float = 1.0
    window_polls: int = 3
    output_dir: str = "runs/scenario"
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    flows: list[FlowConfig] = field(default_factory=list)
    attacks: list[AttackConfig] = field(default_factory=list)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    defense: DefenseConfig = field(default_factory=DefenseConfig)
    automl: AutoMLConfig = field(default_factory=AutoMLConfig)

    def validate(self) -> "ScenarioConfig":
        def bad(path, msg):
            raise ConfigError(f"{path}: {msg}")

        if self.duration_s <= 0:
            bad("duration_s", "must be > 0")
        if self.poll_interval_s <= 0:
            bad("poll_interval_s", "must be > 0")
        if self.window_polls < 2:
            bad("window_polls", "must be >= 2")
        if not 0 <= self.seed < 2**64:
            bad("seed", "must be a non-negative 64-bit integer")
        if self.defense.mode not in DEFENSE_MODES:
            bad("defense.mode", f"must be one of {', '.join(DEFENSE_MODES)}")
        for name in ("hold_down_s", "greedy_threshold_pps", "greedy_hold_down_s"):
            if getattr(self.defense, name) <= 0:
                bad(f"defense.{name}", "must be > 0")
        if not 60 <= self.automl.buffer_s <= 300:
            bad("automl.buffer_s", "must lie within [60, 300]")
        if self.automl.alpha < 0 or self.automl.beta < 0 or self.automl.alpha + self.automl.beta == 0:
            bad("automl.alpha", "alpha and beta must be non-negative and not both zero")
        if self.automl.timing not in ("cost", "wall"):
            bad("automl.timing", "must be 'cost' or 'wall'")
        if self.automl.calibration not in ("global", "per_state"):
            bad("automl.calibration", "must be 'global' or 'per_state'")
        unknown = [a for a in self.automl.algorithms if a not in ALGORITHMS]
        if unknown or not self.automl.algorithms:
            bad("automl.algorithms", f"must be a non-empty subset of {', '.join(ALGORITHMS)}")
        bs = self.automl.bootstrap
        if bs.source not in ("generate", "dir", "none"):
            bad("automl.bootstrap.source", "must be generate, dir or none")
        if bs.source == "dir" and not bs.datasets_dir:
            bad("automl.bootstrap.datasets_dir", "required when source is 'dir'")
        if bs.cell is not None and (len(bs.cell) != 2 or bs.cell[0] not in PAYLOAD_CLASSES
                                    or bs.cell[1] not in SPEED_CLASSES):
            bad("automl.bootstrap.cell", "must be [payload_class, speed_class]")
        for i, f in enumerate(self.flows):
            self._check_traffic(f"flows[{i}]", f.payload, f.speed, f.start_s,
                                self.duration_s if f.stop_s is None else f.stop_s)
        for i, a in enumerate(self.attacks):
            self._check_traffic(f"attacks[{i}]", a.payload, a.speed, a.start_s, a.stop_s)
            if not a.bots:
                bad(f"attacks[{i}].bots", "needs at least one bot")
        if self.probe.interval_s <= 0 or self.probe.timeout_s <= 0:
            bad("probe", "interval_s and timeout_s must be > 0")
        return self

    def _check_traffic(self, path, payload, speed, start, stop):
        if payload not in PAYLOAD_CLASSES:
            raise ConfigError(f"{path}.payload: unknown payload class {payload!r}")
        if speed not in SPEED_CLASSES:
            raise ConfigError(f"{path}.speed: unknown speed class {speed!r}")
        if not 0 <= start < stop <= self.duration_s:
            raise ConfigError(f"{path}: need 0 <= start_s < stop_s <= duration_s")

    @property
    def attack_window(self) -> tuple[float, float] | None:
        if not self.attacks:
            return None
        return min(a.start_s for a in self.attacks), max(a.stop_s for a in self.attacks)


def _convert(tp, value, path):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin in (typing.Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        last = None
        for a in inner:
            try:
                return _convert(a, value, path)
            except ConfigError as e:
                last = e
        raise last
    if dataclasses.is_dataclass(tp):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected a mapping")
        return from_dict(tp, value, path)
    if origin is list:
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list")
        return [_convert(args[0], v, f"{path}[{i}]") for i, v in enumerate(value)]
    if origin is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected a mapping")
        return dict(value)
    if tp is Any:
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    return value


def from_dict(cls, data: dict, path: str = ""):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    for k in data:
        if k not in names:
            raise ConfigError(f"{path + '.' if path else ''}{k}: unknown field")
    kwargs = {k: _convert(hints[k], v, f"{path + '.' if path else ''}{k}") for k, v in data.items()}
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path or cls.__name__}: {e}") from None


def to_dict(obj) -> dict:
    return dataclasses.asdict(obj)


def load_scenario(path: str | Path, overrides: dict[str, Any] | None = None) -> ScenarioConfig:
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"{path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    for dotted, value in (overrides or {}).items():
        node = data
        *parents, leaf = dotted.split(".")
        for p in parents:
            node = node.setdefault(p, {})
        node[leaf] = value
    return from_dict(ScenarioConfig, data).validate()


def load_baseline(path: str | Path, overrides: dict[str, Any] | None = None) -> BaselineConfig:
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"{path}: {e}") from None
    data = data.get("baseline", data)
    data.update(overrides or {})
    return from_dict(BaselineConfig, data, "baseline")
