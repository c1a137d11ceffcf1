"""Packet-level discrete-event substrate: clock, links, topology, network."""

from .engine import US_PER_S, Engine, EngineState, seconds, to_us
from .links import Link, LinkParams
from .packets import Packet, PacketKind
from .topology import Topology, TopologyError, TopologySpec, build_topology

__all__ = [
    "US_PER_S",
    "Engine",
    "EngineState",
    "Link",
    "LinkParams",
    "Packet",
    "PacketKind",
    "Topology",
    "TopologyError",
    "TopologySpec",
    "build_topology",
    "seconds",
    "to_us",
]
