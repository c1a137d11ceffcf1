"""OpenFlow-like control plane: flow tables, PACKET_IN handling, per-flow
statistics and flow deletion.

Flows are matched on the (eth_src, eth_dst) pair only, one table per switch,
no priorities and no idle/hard timeouts: an entry lives until it is deleted.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .sim.packets import Packet, format_mac
from .sim.topology import Topology


class FlowKey(NamedTuple):
    eth_src: int
    eth_dst: int

    def __str__(self):
        return f"{format_mac(self.eth_src)}->{format_mac(self.eth_dst)}"


@dataclass(slots=True)
class FlowEntry:
    key: FlowKey
    out_port: str
    installed_at: int
    pckt_count: int = 0
    byte_count: int = 0
    last_updated: int = 0


@dataclass(frozen=True, slots=True)
class FlowStatsRecord:
    polled_at: int
    switch_id: str
    key: FlowKey
    pckt_count: int
    byte_count: int
    duration_us: int

    @property
    def duration(self) -> float:
        return self.duration_us / 1e6

    @property
    def installed_at(self) -> int:
        return self.polled_at - self.duration_us


@dataclass(frozen=True)
class InstallFlow:
    entry: FlowEntry


@dataclass(frozen=True)
class Defer:
    until: int


@dataclass(frozen=True)
class Drop:
    reason: str


class FlowTable:
    __slots__ = ("switch_id", "entries")

    def __init__(self, switch_id: str):
        self.switch_id = switch_id
        self.entries: dict[FlowKey, FlowEntry] = {}

    def __len__(self):
        return len(self.entries)

    def match(self, packet: Packet, t: int) -> FlowEntry | None:
        """Hit bumps the entry's counters and returns it; Miss returns None."""
        entry = self.entries.get((packet.src_mac, packet.dst_mac))
        if entry is not None:
            entry.pckt_count += 1
            entry.byte_count += packet.payload_size
            entry.last_updated = t
        return entry

    def install(self, entry: FlowEntry) -> None:
        self.entries[entry.key] = entry

    def remove(self, key: FlowKey) -> FlowEntry | None:
        return self.entries.pop(key, None)


class Controller:
    """Central controller owning every switch's flow table.

    Mitigation places keys under hold-down; while held, PACKET_IN for the key
    is answered with Defer and the packet is dropped. The first PACKET_IN
    after expiry clears the hold and installs normally (re-admission).
    """

    def __init__(self, topology: Topology):
        self.topology = topology
        self.tables = {sw: FlowTable(sw) for sw in topology.switches}
        self.hold_downs: dict[FlowKey, int] = {}
        self.packet_in_count: Counter[tuple[str, FlowKey]] = Counter()
        self.installs: Counter[tuple[str, FlowKey]] = Counter()
        self.on_readmit: list[Callable[[FlowKey, int], None]] = []
        self.on_delete: list[Callable[[str, FlowKey, int], None]] = []

    def _table(self, switch_id: str) -> FlowTable:
        try:
            return self.tables[switch_id]
        except KeyError:
            raise KeyError(f"unknown switch {switch_id!r}") from None

    def handle_packet_in(self, switch_id: str, packet: Packet, t: int) -> InstallFlow | Defer | Drop:
        table = self._table(switch_id)
        key = FlowKey(packet.src_mac, packet.dst_mac)
        self.packet_in_count[(switch_id, key)] += 1
        held = self.hold_downs.get(key)
        if held is not None:
            if t < held:
                return Defer(held)
            del self.hold_downs[key]
            for cb in self.on_readmit:
                cb(key, t)
        dst = self.topology.node_by_ip.get(packet.dst_ip)
        if dst is None:
            return Drop(f"no route to {packet.dst_ip}")
        port = self.topology.next_hop(switch_id, dst)
        if port is None:
            return Drop(f"{switch_id} cannot reach {dst}")
        entry = FlowEntry(key, port, installed_at=t, last_updated=t)
        table.install(entry)
        self.installs[(switch_id, key)] += 1
        return InstallFlow(entry)

    def request_flow_stats(self, switch_id: str, t: int) -> list[FlowStatsRecord]:
        table = self._table(switch_id)
        return [
            FlowStatsRecord(t, switch_id, e.key, e.pckt_count, e.byte_count, t - e.installed_at)
            for e in table.entries.values()
        ]

    def delete_flow(self, switch_id: str, key: FlowKey, t: int = 0) -> bool:
        """DEL one entry. True if it existed, False (NotFound) otherwise."""
        removed = self._table(switch_id).remove(key) is not None
        if removed:
            for cb in self.on_delete:
                cb(switch_id, key, t)
        return removed

    def switches_holding(self, key: FlowKey) -> list[str]:
        return [sw for sw, table in self.tables.items() if key in table.entries]

    def hold(self, key: FlowKey, until: int) -> bool:
        """Place or extend a hold-down; returns True if the key was already held."""
        prev = self.hold_downs.get(key)
        self.hold_downs[key] = until if prev is None else max(prev, until)
        return prev is not None

    def is_held(self, key: FlowKey, t: int) -> bool:
        held = self.hold_downs.get(key)
        return held is not None and t < held

    def dump_rows(self, t: int) -> list[tuple[str, str, str, int, int, float]]:
        """Flow-table dump rows: switch_id, eth_src, eth_dst, pckt_count, byte_count, duration_s."""
        rows = []
        for sw in sorted(self.tables):
            for e in sorted(self.tables[sw].entries.values(), key=lambda e: e.key):
                rows.append((sw, format_mac(e.key.eth_src), format_mac(e.key.eth_dst),
                             e.pckt_count, e.byte_count, (t - e.installed_at) / 1e6))
        return rows
