"""Packet forwarding over a topology: end nodes inject packets, switches
match them against their flow tables (PACKET_IN on a miss), links queue
them, and ping probes measure round-trip time.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .control import Controller, Defer, FlowKey, InstallFlow
from .sim.engine import Engine, to_us
from .sim.links import Link
from .sim.packets import Packet, PacketKind
from .sim.topology import Topology

PING_PAYLOAD = 56
TIMEOUT = "TIMEOUT"


@dataclass
class RttSeries:
    """Probe outcomes in send order; ``None`` marks a timeout."""

    probes: list[tuple[int, int | None]] = field(default_factory=list)

    def __post_init__(self):
        for (a, _), (b, _) in zip(self.probes, self.probes[1:]):
            if b <= a:
                raise ValueError("probe send times must be strictly increasing")

    def __len__(self):
        return len(self.probes)

    @property
    def timeouts(self) -> int:
        return sum(r is None for _, r in self.probes)

    def max_consecutive_timeouts(self) -> int:
        best = run = 0
        for _, r in self.probes:
            run = run + 1 if r is None else 0
            best = max(best, run)
        return best

    def between(self, start: int, stop: int) -> "RttSeries":
        return RttSeries([p for p in self.probes if start <= p[0] < stop])

    def mean_rtt_us(self) -> float | None:
        vals = [r for _, r in self.probes if r is not None]
        return sum(vals) / len(vals) if vals else None

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_sent_us", "rtt_us_or_TIMEOUT"])
            for t, r in self.probes:
                w.writerow([t, TIMEOUT if r is None else r])

    @classmethod
    def from_csv(cls, path: str | Path) -> "RttSeries":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["t_sent_us", "rtt_us_or_TIMEOUT"]:
            raise ValueError(f"{path}: line 1: unexpected RTT header")
        probes = []
        for lineno, row in enumerate(rows[1:], start=2):
            try:
                t, r = row
                probes.append((int(t), None if r == TIMEOUT else int(r)))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: malformed row {row!r}") from None
        return cls(probes)


class PingProbe:
    def __init__(self, net: "Network", src: str, dst: str, interval_us: int,
                 timeout_us: int, start_us: int, stop_us: int):
        if src == dst:
            raise ValueError("ping source and destination must differ")
        for n in (src, dst):
            if net.topology.roles.get(n) not in ("host", "sensor"):
                raise ValueError(f"{n!r} is not an end node")
        self.net = net
        self.src, self.dst = src, dst
        self.interval_us, self.timeout_us = interval_us, timeout_us
        self.flow_id = f"ping:{src}->{dst}"
        self.sent: list[int] = []
        self.replies: dict[int, int] = {}
        topo = net.topology
        self._hdr = (topo.mac(src), topo.mac(dst), topo.ip(src), topo.ip(dst))
        net.register_probe(self)
        t = start_us
        while t < stop_us:
            net.engine.schedule(t, self._send, len(self.sent))
            self.sent.append(t)
            t += interval_us

    def _send(self, seq: int) -> None:
        smac, dmac, sip, dip = self._hdr
        self.net.inject(self.src, Packet(smac, dmac, sip, dip, PING_PAYLOAD,
                                         PacketKind.PING_REQUEST, self.flow_id,
                                         self.net.engine.now, seq))

    def on_reply(self, seq: int, t: int) -> None:
        self.replies.setdefault(seq, t)

    def series(self) -> RttSeries:
        """Unanswered probes and replies later than the timeout both count as Timeout."""
        out = []
        for seq, t in enumerate(self.sent):
            back = self.replies.get(seq)
            rtt = None if back is None or back - t > self.timeout_us else back - t
            out.append((t, rtt))
        return RttSeries(out)


class Network:
    def __init__(self, topology: Topology, engine: Engine | None = None):
        self.engine = engine or Engine()
        self.topology = topology
        self.controller = Controller(topology)
        self.links = {ab: Link(ab[0], ab[1], p) for ab, p in topology.links.items()}
        self._roles = topology.roles
        self._attach = {n: topology.attachment(n) for n, r in topology.roles.items()
                        if r in ("host", "sensor")}
        # PACKET_IN round trip over the switch's control channel
        self._control_delay = {sw: 2 * p.propagation_delay_us
                               for sw, p in topology.control_links.items()}
        self._tables = self.controller.tables
        self._probes: dict[str, PingProbe] = {}
        self.ground_truth: dict[FlowKey, int] = {}
        self.flow_ids: dict[FlowKey, set[str]] = {}
        self.dropped_holddown: Counter[FlowKey] = Counter()
        self.dropped_no_route: Counter[FlowKey] = Counter()
        # optional instrumentation: fn(t, switch, key, packet)
        self.forward_hook: Callable[[int, str, FlowKey, Packet], None] | None = None
        self.packet_in_hook: Callable[[int, str, FlowKey, object], None] | None = None

    # -- ground truth ----------------------------------------------------------
    def label_flow(self, src: str, dst: str, flow_id: str, label: int) -> FlowKey:
        key = FlowKey(self.topology.mac(src), self.topology.mac(dst))
        prev = self.ground_truth.get(key)
        if prev is not None and prev != label:
            raise ValueError(f"flow key {key} carries both normal and attack traffic")
        self.ground_truth[key] = label
        self.flow_ids.setdefault(key, set()).add(flow_id)
        return key

    def register_probe(self, probe: PingProbe) -> None:
        self._probes[probe.flow_id] = probe
        self.label_flow(probe.src, probe.dst, probe.flow_id, 0)
        self.label_flow(probe.dst, probe.src, probe.flow_id, 0)

    # -- traffic -----------------------------------------------------------------
    def add_source(self, src: str, dst: str, flow_id: str, label: int,
                   schedule: Iterable[tuple[int, int]]) -> None:
        """Attach a packet source emitting ``(t_us, payload)`` pairs from ``src`` to ``dst``."""
        self.label_flow(src, dst, flow_id, label)
        topo = self.topology
        hdr = (topo.mac(src), topo.mac(dst), topo.ip(src), topo.ip(dst), flow_id)
        it = iter(schedule)
        first = next(it, None)
        if first is not None:
            self.engine.schedule(first[0], self._emit, src, hdr, it, first[1])

    def _emit(self, src: str, hdr: tuple, it: Iterator[tuple[int, int]], size: int) -> None:
        smac, dmac, sip, dip, fid = hdr
        now = self.engine.now
        self.inject(src, Packet(smac, dmac, sip, dip, size, PacketKind.UDP_DATA, fid, now))
        nxt = next(it, None)
        if nxt is not None:
            self.engine.schedule(nxt[0], self._emit, src, hdr, it, nxt[1])

    def ping(self, src: str, dst: str, interval_s: float = 1.0, timeout_s: float = 10.0,
             start_s: float = 0.0, stop_s: float = 60.0) -> PingProbe:
        return PingProbe(self, src, dst, to_us(interval_s), to_us(timeout_s),
                         to_us(start_s), to_us(stop_s))

    # -- forwarding ----------------------------------------------------------------
    def inject(self, node: str, packet: Packet) -> None:
        self._transmit(node, self._attach[node], packet)

    def _transmit(self, a: str, b: str, packet: Packet) -> None:
        at = self.links[(a, b)].enqueue(self.engine.now)
        if at is None:
            return
        role = self._roles[b]
        if role == "switch":
            self.engine.schedule(at, self._at_switch, b, packet)
        elif packet.kind != PacketKind.UDP_DATA:
            # data packets are sunk silently; the link still accounts delivery
            self.engine.schedule(at, self._at_host, b, packet)

    def _at_switch(self, sw: str, packet: Packet) -> None:
        t = self.engine.now
        entry = self._tables[sw].match(packet, t)
        if entry is not None:
            if self.forward_hook is not None:
                self.forward_hook(t, sw, entry.key, packet)
            self._transmit(sw, entry.out_port, packet)
            return
        decision = self.controller.handle_packet_in(sw, packet, t)
        if self.packet_in_hook is not None:
            self.packet_in_hook(t, sw, FlowKey(packet.src_mac, packet.dst_mac), decision)
        if type(decision) is InstallFlow:
            # packet-out once the controller's answer is back
            out = decision.entry
            if self.forward_hook is not None:
                self.forward_hook(t, sw, out.key, packet)
            self.engine.schedule(t + self._control_delay[sw], self._transmit, sw, out.out_port, packet)
        elif type(decision) is Defer:
            self.dropped_holddown[FlowKey(packet.src_mac, packet.dst_mac)] += 1
        else:
            self.dropped_no_route[FlowKey(packet.src_mac, packet.dst_mac)] += 1

    def _at_host(self, node: str, packet: Packet) -> None:
        if packet.kind == PacketKind.PING_REQUEST:
            self.inject(node, Packet(packet.dst_mac, packet.src_mac, packet.dst_ip, packet.src_ip,
                                     packet.payload_size, PacketKind.PING_REPLY, packet.flow_id,
                                     self.engine.now, packet.seq))
        elif packet.kind == PacketKind.PING_REPLY:
            probe = self._probes.get(packet.flow_id)
            if probe is not None:
                probe.on_reply(packet.seq, self.engine.now)

    def run_until_s(self, t_s: float):
        return self.engine.run_until(to_us(t_s))


def ping_probe(net: Network, src: str, dst: str, interval_s: float = 1.0,
               timeout_s: float = 10.0, duration_s: float = 10.0) -> RttSeries:
    """Ping ``dst`` from ``src`` for ``duration_s`` starting now, run the
    engine until the last probe's deadline and return the series."""
    start = net.engine.now / 1e6
    probe = net.ping(src, dst, interval_s, timeout_s, start, start + duration_s)
    last = probe.sent[-1] if probe.sent else net.engine.now
    net.engine.run_until(last + probe.timeout_us)
    return probe.series()
