"""Synthetic UDP traffic in the payload/speed classes of the simulation grid.

Each flow draws one rate uniformly from its speed class and one payload per
packet uniformly from its payload class; packets leave at a constant gap of
1/rate (packet j at ``start + floor(j * 1e6 / rate)`` microseconds).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .sim.engine import to_us
from .sim.topology import Topology

PAYLOAD_CLASSES: dict[str, tuple[int, int]] = {
    "small": (100, 999),
    "medium": (1000, 9999),
    "large": (10000, 99999),
}
SPEED_CLASSES: dict[str, tuple[int, int]] = {
    "low": (1, 100),
    "moderate": (101, 1000),
    "fast": (1001, 10000),
}
CELLS = [(p, s) for p in PAYLOAD_CLASSES for s in SPEED_CLASSES]

_CHUNK = 4096


@dataclass(frozen=True)
class TrafficProfile:
    payload_class: str
    speed_class: str
    seed: int = 0

    def __post_init__(self):
        if self.payload_class not in PAYLOAD_CLASSES:
            raise ValueError(f"unknown payload class {self.payload_class!r}")
        if self.speed_class not in SPEED_CLASSES:
            raise ValueError(f"unknown speed class {self.speed_class!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def payload_range(self) -> tuple[int, int]:
        return PAYLOAD_CLASSES[self.payload_class]

    @property
    def rate_range(self) -> tuple[int, int]:
        return SPEED_CLASSES[self.speed_class]

    def rng(self, stream: int = 0, payload: bool = False) -> np.random.Generator:
        # rate and payload draws use separate streams
        return np.random.default_rng([self.seed, stream, int(payload)])


class PacketEvent(NamedTuple):
    t_us: int
    src: str
    dst: str
    payload_size: int
    flow_id: str


@dataclass(frozen=True)
class FlowPlan:
    """One constant-rate flow with its rate already drawn."""

    src: str
    dst: str
    flow_id: str
    label: int
    rate_pps: int
    start_us: int
    stop_us: int
    profile: TrafficProfile
    stream: int

    def schedule(self) -> Iterator[tuple[int, int]]:
        """Yield ``(t_us, payload)``; deterministic for a given plan."""
        rng = self.profile.rng(self.stream, payload=True)
        lo, hi = self.profile.payload_range
        j = 0
        sizes = rng.integers(lo, hi + 1, size=_CHUNK)
        while True:
            t = self.start_us + (j * 1_000_000) // self.rate_pps
            if t >= self.stop_us:
                return
            k = j % _CHUNK
            if k == 0 and j:
                sizes = rng.integers(lo, hi + 1, size=_CHUNK)
            yield t, int(sizes[k])
            j += 1

    def packets(self) -> list[PacketEvent]:
        return [PacketEvent(t, self.src, self.dst, size, self.flow_id) for t, size in self.schedule()]


def plan_flow(profile: TrafficProfile, src: str, dst: str, start_us: int, stop_us: int,
              *, stream: int = 0, flow_id: str | None = None, label: int = 0) -> FlowPlan:
    if stop_us <= start_us:
        raise ValueError("flow duration must be > 0")
    rng = profile.rng(stream)
    lo, hi = profile.rate_range
    rate = int(rng.integers(lo, hi + 1))
    return FlowPlan(src, dst, flow_id or f"{src}->{dst}#{stream}", label, rate,
                    start_us, stop_us, profile, stream)


def sample_flow(profile: TrafficProfile, src: str, dst: str, duration_s: float,
                *, start_s: float = 0.0, stream: int = 0) -> list[PacketEvent]:
    if duration_s <= 0:
        raise ValueError("duration must be > 0")
    start = to_us(start_s)
    return plan_flow(profile, src, dst, start, start + to_us(duration_s), stream=stream).packets()


@dataclass(frozen=True)
class AttackScenario:
    target: str
    bot_sources: tuple[str, ...]
    profile: TrafficProfile
    start_us: int
    stop_us: int

    def __post_init__(self):
        if not self.bot_sources:
            raise ValueError("attack needs at least one bot")
        if self.stop_us < self.start_us:
            raise ValueError("attack stop precedes start")
        if self.target in self.bot_sources:
            raise ValueError("target cannot be one of its own bots")


def attack_plans(scenario: AttackScenario, topology: Topology | None = None,
                 stream_base: int = 1_000_000) -> list[FlowPlan]:
    """One flow per bot toward the target, every flow labelled 1 (DDoS)."""
    if topology is not None:
        for n in (scenario.target, *scenario.bot_sources):
            if topology.roles.get(n) not in ("host", "sensor"):
                raise ValueError(f"unknown attack endpoint {n!r}")
        for b in scenario.bot_sources:
            topology.path(b, scenario.target)  # raises if unreachable
    if scenario.stop_us == scenario.start_us:
        return []
    return [
        plan_flow(scenario.profile, bot, scenario.target, scenario.start_us, scenario.stop_us,
                  stream=stream_base + i, flow_id=f"attack:{bot}->{scenario.target}", label=1)
        for i, bot in enumerate(scenario.bot_sources)
    ]


def build_attack(scenario: AttackScenario, topology: Topology | None = None) -> list[PacketEvent]:
    events = [e for plan in attack_plans(scenario, topology) for e in plan.packets()]
    events.sort(key=lambda e: (e.t_us, e.src))
    return events


def classify(value: float, classes: dict[str, tuple[int, int]]) -> str:
    """Class whose interval contains ``value`` (nearest interval if outside all)."""
    best, gap = None, float("inf")
    for name, (lo, hi) in classes.items():
        d = 0.0 if lo <= value < hi + 1 else min(abs(value - lo), abs(value - hi))
        if d < gap:
            best, gap = name, d
    return best
