import pytest

from sdsn_automl.sim import TopologyError, TopologySpec, build_topology
from sdsn_automl.sim.topology import (DEFAULT_ACCESS, DEFAULT_CONTROL, SCALING_NODE_COUNTS,
                                      minimal_spec, scaling_spec, edge_core_spec)


def test_testbed_layout():
    topo = build_topology(edge_core_spec())
    assert topo.switches == ["s1", "s2", "s3"]
    assert topo.attachment("h1") == "s1"
    assert topo.attachment("h3") == "s2"
    assert topo.attachment("h6") == "s3"
    assert topo.path("h3", "h1") == ["h3", "s2", "s1", "h1"]
    assert topo.next_hop("s2", "h5") == "s1"


def test_addresses_unique_and_reversible():
    topo = build_topology(scaling_spec(100))
    macs = [topo.mac(n) for n in topo.addresses]
    assert len(set(macs)) == len(macs)
    for n in topo.addresses:
        assert topo.node_by_mac[topo.mac(n)] == n
        assert topo.node_by_ip[topo.ip(n)] == n


@pytest.mark.parametrize("count", SCALING_NODE_COUNTS)
def test_scaling_sizes(count):
    topo = build_topology(scaling_spec(count))
    assert len(topo.sensors) == count


def test_scaling_rejects_off_grid_sizes():
    with pytest.raises(TopologyError):
        scaling_spec(150)
    assert len(build_topology(scaling_spec(3, strict=False)).sensors) == 3


def test_equal_length_paths_break_ties_by_node_id():
    nodes = {"c0": "controller", "s1": "switch", "s2": "switch", "s3": "switch", "s4": "switch",
             "h1": "host", "h2": "host"}
    links = [("s1", "s3", DEFAULT_ACCESS), ("s1", "s2", DEFAULT_ACCESS),
             ("s2", "s4", DEFAULT_ACCESS), ("s3", "s4", DEFAULT_ACCESS),
             ("s1", "h1", DEFAULT_ACCESS), ("s4", "h2", DEFAULT_ACCESS)]
    links += [("c0", s, DEFAULT_CONTROL) for s in ("s1", "s2", "s3", "s4")]
    topo = build_topology(TopologySpec(nodes, links))
    assert topo.path("h1", "h2") == ["h1", "s1", "s2", "s4", "h2"]


@pytest.mark.parametrize("mutate, msg", [
    (lambda n, l: n.update(x="router"), "unknown role"),
    (lambda n, l: n.pop("s1") and l.clear(), "switch"),
    (lambda n, l: l.remove(("c0", "s1", DEFAULT_CONTROL)), "control link"),
    (lambda n, l: l.remove(("s1", "h2", DEFAULT_ACCESS)), "h2"),
    (lambda n, l: l.append(("h1", "h1", DEFAULT_ACCESS)), "self-loop"),
])
def test_invalid_topologies(mutate, msg):
    spec = minimal_spec()
    nodes, links = dict(spec.nodes), list(spec.links)
    mutate(nodes, links)
    with pytest.raises(TopologyError, match=msg):
        build_topology(TopologySpec(nodes, links))


def test_duplicate_ip_rejected():
    spec = minimal_spec()
    addrs = {"h1": (1, "10.0.0.1"), "h2": (2, "10.0.0.1")}
    with pytest.raises(TopologyError, match="duplicate IP"):
        build_topology(TopologySpec(spec.nodes, spec.links, addresses=addrs))
