"""Topology description, validation, presets and static routing."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .links import LinkParams

ROLES = ("host", "sensor", "switch", "controller")
END_ROLES = ("host", "sensor")

# node counts exercised by the scaling preset
SCALING_NODE_COUNTS = (100, 200, 300, 400, 500, 600, 700, 800, 900, 1000)


class TopologyError(ValueError):
    pass


@dataclass
class TopologySpec:
    nodes: dict[str, str]
    links: list[tuple[str, str, LinkParams]]
    controller: str = "c0"
    addresses: dict[str, tuple[int, str]] | None = None


@dataclass
class Topology:
    roles: dict[str, str]
    controller: str
    links: dict[tuple[str, str], LinkParams]  # both directions, data plane only
    control_links: dict[str, LinkParams]  # switch -> its control channel
    addresses: dict[str, tuple[int, str]]
    neighbors: dict[str, list[str]] = field(init=False)
    node_by_mac: dict[int, str] = field(init=False)
    node_by_ip: dict[str, str] = field(init=False)
    _routes: dict[str, dict[str, int]] = field(init=False, default_factory=dict)

    def __post_init__(self):
        nbrs: dict[str, list[str]] = {n: [] for n in self.roles if self.roles[n] != "controller"}
        for a, b in self.links:
            nbrs[a].append(b)
        self.neighbors = {n: sorted(v) for n, v in nbrs.items()}
        self.node_by_mac = {mac: n for n, (mac, _) in self.addresses.items()}
        self.node_by_ip = {ip: n for n, (_, ip) in self.addresses.items()}

    @property
    def switches(self) -> list[str]:
        return sorted(n for n, r in self.roles.items() if r == "switch")

    @property
    def hosts(self) -> list[str]:
        return sorted((n for n, r in self.roles.items() if r == "host"), key=natural_key)

    @property
    def sensors(self) -> list[str]:
        return sorted((n for n, r in self.roles.items() if r == "sensor"), key=natural_key)

    def mac(self, node: str) -> int:
        return self.addresses[node][0]

    def ip(self, node: str) -> str:
        return self.addresses[node][1]

    def attachment(self, node: str) -> str:
        """The switch an end node hangs off."""
        return self.neighbors[node][0]

    def _distances(self, dst: str) -> dict[str, int]:
        dist = self._routes.get(dst)
        if dist is None:
            # only switches forward; end nodes are leaves except the destination itself
            dist = {dst: 0}
            frontier = deque([dst])
            while frontier:
                n = frontier.popleft()
                for m in self.neighbors[n]:
                    if m not in dist and self.roles[m] == "switch":
                        dist[m] = dist[n] + 1
                        frontier.append(m)
            self._routes[dst] = dist
        return dist

    def next_hop(self, switch: str, dst: str) -> str | None:
        """Neighbour of ``switch`` on a hop-count shortest path to ``dst``;
        ties go to the lowest node id. None if unreachable."""
        dist = self._distances(dst)
        d = dist.get(switch)
        if d is None:
            return None
        for m in self.neighbors[switch]:  # sorted, so first match is lowest id
            if dist.get(m) == d - 1:
                return m
        return None

    def path(self, src: str, dst: str) -> list[str]:
        """Node sequence from end node ``src`` to end node ``dst``."""
        hops = [src, self.attachment(src)]
        while hops[-1] != dst:
            nxt = self.next_hop(hops[-1], dst)
            if nxt is None:
                raise TopologyError(f"no route from {src} to {dst}")
            hops.append(nxt)
        return hops


def natural_key(node: str):
    m = re.fullmatch(r"([A-Za-z_]*)(\d+)", node)
    return (m.group(1), int(m.group(2))) if m else (node, -1)


def default_addresses(roles: dict[str, str]) -> dict[str, tuple[int, str]]:
    """Hosts ``hN`` get 10.0.0.N; sensors are numbered in natural order under 10.1/16."""
    out: dict[str, tuple[int, str]] = {}
    spare = 200
    for n in sorted((n for n, r in roles.items() if r == "host"), key=natural_key):
        m = re.fullmatch(r"h(\d+)", n)
        if m and 1 <= int(m.group(1)) <= 199:
            k = int(m.group(1))
        else:
            k = spare
            spare += 1
        out[n] = (k, f"10.0.0.{k}")
    sensors = sorted((n for n, r in roles.items() if r == "sensor"), key=natural_key)
    for k, n in enumerate(sensors, start=1):
        out[n] = (0x0200_0000_0000 + k, f"10.1.{k // 200}.{k % 200 + 1}")
    return out


def build_topology(spec: TopologySpec) -> Topology:
    roles = dict(spec.nodes)
    for n, r in roles.items():
        if r not in ROLES:
            raise TopologyError(f"node {n!r}: unknown role {r!r}")
    controllers = [n for n, r in roles.items() if r == "controller"]
    if controllers != [spec.controller]:
        raise TopologyError(f"expected exactly one controller named {spec.controller!r}, found {controllers}")
    switches = [n for n, r in roles.items() if r == "switch"]
    if not switches:
        raise TopologyError("topology needs at least one switch")
    if sum(r == "host" for r in roles.values()) < 2:
        raise TopologyError("topology needs at least two hosts")

    data: dict[tuple[str, str], LinkParams] = {}
    control: dict[str, LinkParams] = {}
    for a, b, params in spec.links:
        for n in (a, b):
            if n not in roles:
                raise TopologyError(f"link ({a}, {b}) references unknown node {n!r}")
        if a == b:
            raise TopologyError(f"self-loop on {a!r}")
        if spec.controller in (a, b):
            sw = b if a == spec.controller else a
            if roles[sw] != "switch":
                raise TopologyError(f"control link ({a}, {b}) must join the controller to a switch")
            if sw in control:
                raise TopologyError(f"duplicate control link for switch {sw!r}")
            control[sw] = params
            continue
        if (a, b) in data:
            raise TopologyError(f"duplicate link ({a}, {b})")
        data[(a, b)] = params
        data[(b, a)] = params
    for sw in switches:
        if sw not in control:
            raise TopologyError(f"switch {sw!r} has no control link to {spec.controller!r}")

    degree: dict[str, list[str]] = {n: [] for n in roles if roles[n] != "controller"}
    for a, b in data:
        degree[a].append(b)
    for n, nb in degree.items():
        if roles[n] in END_ROLES:
            if len(nb) != 1 or roles[nb[0]] != "switch":
                raise TopologyError(f"end node {n!r} must have exactly one link, to a switch")

    start = switches[0]
    seen = {start}
    stack = [start]
    while stack:
        for m in degree[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    missing = sorted(set(degree) - seen)
    if missing:
        raise TopologyError(f"topology is disconnected: {missing[0]!r} unreachable from {start!r}")

    addresses = dict(spec.addresses) if spec.addresses is not None else default_addresses(roles)
    for n, r in roles.items():
        if r in END_ROLES and n not in addresses:
            raise TopologyError(f"end node {n!r} has no address")
    macs: dict[int, str] = {}
    ips: dict[str, str] = {}
    for n, (mac, ip) in addresses.items():
        if not 0 <= mac < 1 << 48:
            raise TopologyError(f"node {n!r}: MAC out of 48-bit range")
        if mac in macs:
            raise TopologyError(f"duplicate MAC address on {macs[mac]!r} and {n!r}")
        if ip in ips:
            raise TopologyError(f"duplicate IP address {ip} on {ips[ip]!r} and {n!r}")
        macs[mac] = n
        ips[ip] = n
    return Topology(roles=roles, controller=spec.controller, links=data,
                    control_links=control, addresses=addresses)


# -- presets -----------------------------------------------------------------

DEFAULT_ACCESS = LinkParams(propagation_delay_us=50, capacity_pps=100_000, queue_capacity=10_000)
DEFAULT_TRUNK = LinkParams(propagation_delay_us=100, capacity_pps=100_000, queue_capacity=10_000)
DEFAULT_CONTROL = LinkParams(propagation_delay_us=500, capacity_pps=100_000, queue_capacity=10_000)


def minimal_spec(link: LinkParams = DEFAULT_ACCESS) -> TopologySpec:
    """One switch, two hosts, a controller."""
    return TopologySpec(
        nodes={"c0": "controller", "s1": "switch", "h1": "host", "h2": "host"},
        links=[("s1", "h1", link), ("s1", "h2", link), ("c0", "s1", DEFAULT_CONTROL)],
    )


def edge_core_spec(n_sensors: int = 8,
                 access: LinkParams = DEFAULT_ACCESS,
                 trunk: LinkParams = DEFAULT_TRUNK,
                 target: LinkParams | None = None,
                 control: LinkParams = DEFAULT_CONTROL) -> TopologySpec:
    """Attack test bed: core switch s1 with the target h1 and h2; edge switch s2
    with h3, h4 and half the sensors; edge switch s3 with h5, h6 and the rest.
    ``target`` overrides the s1-h1 link (the bottleneck under attack)."""
    nodes = {"c0": "controller", "s1": "switch", "s2": "switch", "s3": "switch"}
    links: list[tuple[str, str, LinkParams]] = [
        ("s1", "s2", trunk), ("s1", "s3", trunk),
        ("s1", "h1", target or access), ("s1", "h2", access),
        ("s2", "h3", access), ("s2", "h4", access),
        ("s3", "h5", access), ("s3", "h6", access),
    ]
    for i in range(1, 7):
        nodes[f"h{i}"] = "host"
    for i in range(1, n_sensors + 1):
        nodes[f"n{i}"] = "sensor"
        links.append(("s2" if i <= (n_sensors + 1) // 2 else "s3", f"n{i}", access))
    for sw in ("s1", "s2", "s3"):
        links.append(("c0", sw, control))
    return TopologySpec(nodes=nodes, links=links)


def scaling_spec(node_count: int, n_hosts: int = 4,
                 access: LinkParams = DEFAULT_ACCESS,
                 control: LinkParams = DEFAULT_CONTROL,
                 strict: bool = True) -> TopologySpec:
    """Single-switch star used for baseline data: ``n_hosts`` hosts plus
    ``node_count`` sensors on s1."""
    if strict and node_count not in SCALING_NODE_COUNTS:
        raise TopologyError(f"node_count {node_count} not in {SCALING_NODE_COUNTS}")
    if node_count < 1:
        raise TopologyError("node_count must be >= 1")
    nodes = {"c0": "controller", "s1": "switch"}
    links: list[tuple[str, str, LinkParams]] = [("c0", "s1", control)]
    for i in range(1, n_hosts + 1):
        nodes[f"h{i}"] = "host"
        links.append(("s1", f"h{i}", access))
    for i in range(1, node_count + 1):
        nodes[f"n{i}"] = "sensor"
        links.append(("s1", f"n{i}", access))
    return TopologySpec(nodes=nodes, links=links)
