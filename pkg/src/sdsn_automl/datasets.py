"""Labelled flow-window datasets: CSV persistence and generation of the nine
baseline datasets (one per payload x speed cell)."""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .monitoring import FEATURE_NAMES, FeatureVector, Monitor
from .network import Network
from .sim.engine import to_us
from .sim.topology import build_topology, scaling_spec
from .traffic import CELLS, SPEED_CLASSES, TrafficProfile, plan_flow

log = logging.getLogger(__name__)

CSV_HEADER = [*FEATURE_NAMES, "label"]
_INT_FEATURES = {"src_fanout", "dst_fanin"}


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSample:
    features: FeatureVector
    label: int


@dataclass
class Dataset:
    samples: list[LabeledSample]
    provenance: tuple[str, str, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.samples:
            raise DatasetError("dataset must contain at least one sample")
        for s in self.samples:
            if s.label not in (0, 1):
                raise DatasetError(f"label must be 0 or 1, got {s.label!r}")

    def __len__(self):
        return len(self.samples)

    @property
    def X(self) -> np.ndarray:
        return np.array([s.features for s in self.samples], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)

    def label_counts(self) -> tuple[int, int]:
        n1 = sum(s.label for s in self.samples)
        return len(self.samples) - n1, n1

    def subset(self, idx: Iterable[int]) -> "Dataset":
        return Dataset([self.samples[i] for i in idx], self.provenance)

    def __add__(self, other: "Dataset") -> "Dataset":
        return Dataset(self.samples + other.samples, self.provenance)


def _fmt(name: str, v) -> str:
    return str(int(v)) if name in _INT_FEATURES else repr(float(v))


def export_csv(dataset: Dataset, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for s in dataset.samples:
            w.writerow([_fmt(n, v) for n, v in zip(FEATURE_NAMES, s.features)] + [s.label])


def load_csv(path: str | Path) -> Dataset:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise DatasetError(f"{path}: line 1: header must be {','.join(CSV_HEADER)}")
    samples = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            if len(row) != len(CSV_HEADER):
                raise ValueError
            vals = [int(v) if n in _INT_FEATURES else float(v) for n, v in zip(FEATURE_NAMES, row)]
            label = int(row[-1])
            if label not in (0, 1) or not np.all(np.isfinite(vals)):
                raise ValueError
        except ValueError:
            raise DatasetError(f"{path}: line {lineno}: malformed row {','.join(row)!r}") from None
        samples.append(LabeledSample(FeatureVector(*vals), label))
    if not samples:
        raise DatasetError(f"{path}: no samples")
    m = re.fullmatch(r"baseline_([a-z]+)_([a-z]+)\.csv", path.name)
    prov = (m.group(1), m.group(2), -1) if m else None
    return Dataset(samples, prov)


def dataset_filename(payload: str, speed: str) -> str:
    return f"baseline_{payload}_{speed}.csv"


@dataclass
class BaselineConfig:
    """Knobs for one baseline run per (payload, speed) cell.

    ``normal_flows`` may be a single count or a per-speed-class mapping;
    ``attack_speed`` is a speed class or ``"match"`` for the cell's own class.
    """

    seed: int = 2021
    node_count: int = 100
    n_hosts: int = 4
    duration_s: float = 20.0
    normal_flows: int | dict[str, int] = 10
    attack_bots: int = 5
    attack_start_s: float = 5.0
    attack_stop_s: float = 17.0
    attack_speed: str = "fast"
    attack_ramp_s: float = 4.0  # bots join one by one over this span
    target: str = "h1"
    probe_src: str = "h2"
    window_polls: int = 3
    poll_interval_s: float = 1.0

    def __post_init__(self):
        if self.attack_speed != "match" and self.attack_speed not in SPEED_CLASSES:
            raise ValueError(f"attack_speed must be a speed class or 'match', got {self.attack_speed!r}")
        if not 0 <= self.attack_start_s < self.attack_stop_s <= self.duration_s:
            raise ValueError("need 0 <= attack_start_s < attack_stop_s <= duration_s")
        if not 0 <= self.attack_ramp_s < self.attack_stop_s - self.attack_start_s:
            raise ValueError("attack_ramp_s must be shorter than the attack")
        if self.attack_bots < 1:
            raise ValueError("attack_bots must be >= 1")

    def flows_for(self, speed: str) -> int:
        if isinstance(self.normal_flows, dict):
            return int(self.normal_flows.get(speed, 0))
        return int(self.normal_flows)


def labeled_windows(vectors, ground_truth) -> list[LabeledSample]:
    """Label live windows by the flow's ground truth. Idle windows (no packets)
    are left out: a finished attack flow's entry says nothing about attacks."""
    return [LabeledSample(fv, ground_truth[k]) for k, fv in vectors if fv.pckt_rate > 0]


def cell_seed(seed: int, payload: str, speed: str) -> int:
    idx = CELLS.index((payload, speed))
    return int(np.random.SeedSequence([seed, idx]).generate_state(1, np.uint64)[0])


def run_cell(config: BaselineConfig, payload: str, speed: str) -> Dataset:
    """Simulate one cell on the single-switch star and return its labelled windows."""
    seed = cell_seed(config.seed, payload, speed)
    topo = build_topology(scaling_spec(config.node_count, config.n_hosts))
    net = Network(topo)
    rng = np.random.default_rng(seed)
    duration = to_us(config.duration_s)

    sensors = topo.sensors
    n_normal = config.flows_for(speed)
    if n_normal + config.attack_bots > len(sensors):
        raise ValueError("not enough sensors for the requested flows and bots")
    chosen = rng.permutation(len(sensors))
    bots = [sensors[i] for i in sorted(chosen[:config.attack_bots])]
    sources = [sensors[i] for i in chosen[config.attack_bots:config.attack_bots + n_normal]]
    sinks = [n for n in topo.hosts + sensors if n != config.target]

    normal = TrafficProfile(payload, speed, seed)
    for i, src in enumerate(sources):
        dst = src
        while dst == src:
            dst = sinks[int(rng.integers(len(sinks)))]
        start = int(rng.integers(0, 2_000_000))
        plan = plan_flow(normal, src, dst, start, duration, stream=i, label=0)
        net.add_source(plan.src, plan.dst, plan.flow_id, 0, plan.schedule())

    attack_speed = speed if config.attack_speed == "match" else config.attack_speed
    attack = TrafficProfile(payload, attack_speed, seed)
    for i, bot in enumerate(bots):
        join = config.attack_start_s + config.attack_ramp_s * i / config.attack_bots
        plan = plan_flow(attack, bot, config.target, to_us(join),
                         to_us(config.attack_stop_s), stream=10_000 + i,
                         flow_id=f"attack:{bot}->{config.target}", label=1)
        net.add_source(plan.src, plan.dst, plan.flow_id, 1, plan.schedule())

    net.ping(config.probe_src, config.target, 1.0, 10.0, 0.0, config.duration_s)

    monitor = Monitor(net.controller, topo, config.window_polls)
    samples: list[LabeledSample] = []
    step = to_us(config.poll_interval_s)
    t = step
    while t <= duration:
        net.engine.run_until(t)
        samples.extend(labeled_windows(monitor.update(monitor.poll(t)), net.ground_truth))
        t += step
    if not samples:
        raise DatasetError(f"cell ({payload}, {speed}) produced no samples")
    ds = Dataset(samples, (payload, speed, seed))
    n0, n1 = ds.label_counts()
    if n0 == 0 or n1 == 0:
        raise DatasetError(f"cell ({payload}, {speed}) produced single-label data ({n0} normal, {n1} attack)")
    return ds


def build_baseline_datasets(config: BaselineConfig, out_dir: str | Path | None = None) -> dict[tuple[str, str], Dataset]:
    out: dict[tuple[str, str], Dataset] = {}
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    for payload, speed in CELLS:
        ds = run_cell(config, payload, speed)
        n0, n1 = ds.label_counts()
        log.info("baseline %s/%s: %d samples (%d normal, %d attack)", payload, speed, len(ds), n0, n1)
        out[(payload, speed)] = ds
        if out_dir is not None:
            export_csv(ds, Path(out_dir) / dataset_filename(payload, speed))
    return out


def load_baseline_dir(path: str | Path) -> dict[tuple[str, str], Dataset]:
    path = Path(path)
    missing = [dataset_filename(p, s) for p, s in CELLS if not (path / dataset_filename(p, s)).exists()]
    if missing:
        raise FileNotFoundError(f"missing datasets in {path}: {', '.join(missing)}")
    return {(p, s): load_csv(path / dataset_filename(p, s)) for p, s in CELLS}


