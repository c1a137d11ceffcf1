"""Per-second flow-statistics polling and windowed feature extraction."""

from __future__ import annotations

from collections import deque
from typing import NamedTuple, Sequence

import numpy as np

from .control import Controller, FlowKey, FlowStatsRecord
from .sim.topology import Topology

FEATURE_NAMES = ("pckt_rate", "byte_rate", "mean_pckt_size", "flow_duration",
                 "src_fanout", "dst_fanin")


class FeatureVector(NamedTuple):
    pckt_rate: float
    byte_rate: float
    mean_pckt_size: float
    flow_duration: float
    src_fanout: int
    dst_fanin: int

    def as_array(self) -> np.ndarray:
        return np.asarray(self, dtype=float)


class WindowReset(ValueError):
    """Counters went backwards inside a window: the entry was recycled."""


def poll_cycle(controller: Controller, t: int) -> list[FlowStatsRecord]:
    """Flow statistics of every switch, all stamped ``t``."""
    out: list[FlowStatsRecord] = []
    for sw in sorted(controller.tables):
        out.extend(controller.request_flow_stats(sw, t))
    return out


def featurize(window: Sequence[FlowStatsRecord], src_fanout: int = 1, dst_fanin: int = 1) -> FeatureVector:
    """Rates from the counter deltas between the first and last poll of the window."""
    window = list(window)
    if len(window) < 2:
        raise ValueError("feature window needs at least two polls")
    first, last = window[0], window[-1]
    for a, b in zip(window, window[1:]):
        if b.key != a.key:
            raise ValueError("window mixes flow keys")
        if b.polled_at <= a.polled_at:
            raise ValueError("polls must be in time order")
        if b.installed_at != a.installed_at or b.pckt_count < a.pckt_count or b.byte_count < a.byte_count:
            raise WindowReset(f"entry for {a.key} recycled between polls")
    span = (last.polled_at - first.polled_at) / 1e6
    dp = last.pckt_count - first.pckt_count
    db = last.byte_count - first.byte_count
    return FeatureVector(
        pckt_rate=dp / span,
        byte_rate=db / span,
        mean_pckt_size=db / dp if dp else 0.0,
        flow_duration=last.duration,
        src_fanout=src_fanout,
        dst_fanin=dst_fanin,
    )


class Monitor:
    """Keeps a sliding window of polls per flow key and emits one feature
    vector per key per poll once the window is full (stride one poll).

    Each key is tracked on its ingress switch, the switch the source node is
    attached to, which sees the offered load before any downstream queue.
    """

    def __init__(self, controller: Controller, topology: Topology, window_polls: int = 3):
        if window_polls < 2:
            raise ValueError("window_polls must be >= 2")
        self.controller = controller
        self.window_polls = window_polls
        self._ingress = {topology.mac(n): topology.attachment(n) for n in topology.addresses
                         if n in topology.roles}
        self._windows: dict[FlowKey, deque[FlowStatsRecord]] = {}
        self._seen: deque[frozenset[FlowKey]] = deque(maxlen=window_polls)
        self.polls = 0

    def poll(self, t: int) -> list[FlowStatsRecord]:
        return poll_cycle(self.controller, t)

    def update(self, records: Sequence[FlowStatsRecord]) -> list[tuple[FlowKey, FeatureVector]]:
        self.polls += 1
        latest: dict[FlowKey, FlowStatsRecord] = {}
        keys: set[FlowKey] = set()
        for r in records:
            keys.add(r.key)
            if self._ingress.get(r.key.eth_src) == r.switch_id:
                latest[r.key] = r
        self._seen.append(frozenset(keys))

        for k in list(self._windows):
            if k not in latest:
                del self._windows[k]  # entry gone: window restarts when it returns
        for k, rec in latest.items():
            w = self._windows.get(k)
            if w is None:
                w = self._windows[k] = deque(maxlen=self.window_polls)
            elif rec.installed_at != w[-1].installed_at or rec.pckt_count < w[-1].pckt_count:
                w.clear()
            w.append(rec)

        fanout: dict[int, set[int]] = {}
        fanin: dict[int, set[int]] = {}
        for seen in self._seen:
            for k in seen:
                fanout.setdefault(k.eth_src, set()).add(k.eth_dst)
                fanin.setdefault(k.eth_dst, set()).add(k.eth_src)

        out = []
        for k in sorted(latest):
            w = self._windows[k]
            if len(w) == self.window_polls:
                out.append((k, featurize(w, len(fanout[k.eth_src]), len(fanin[k.eth_dst]))))
        return out
