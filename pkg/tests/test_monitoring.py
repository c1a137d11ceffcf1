import pytest
from hypothesis import given, strategies as st

from sdsn_automl.control import FlowKey, FlowStatsRecord
from sdsn_automl.monitoring import FeatureVector, Monitor, WindowReset, featurize
from sdsn_automl.network import Network
from sdsn_automl.sim import build_topology
from sdsn_automl.sim.topology import edge_core_spec

KEY = FlowKey(3, 1)


def rec(t_s, pk, by, installed_s=0.0, key=KEY, sw="s2"):
    t = int(t_s * 1e6)
    return FlowStatsRecord(t, sw, key, pk, by, t - int(installed_s * 1e6))


def test_featurize_by_hand():
    fv = featurize([rec(1, 10, 1000), rec(2, 30, 3000), rec(3, 50, 6000)], 2, 4)
    assert fv == FeatureVector(20.0, 2500.0, 125.0, 3.0, 2, 4)


def test_idle_window_has_zero_size():
    fv = featurize([rec(1, 5, 500), rec(2, 5, 500)])
    assert fv.pckt_rate == 0 and fv.mean_pckt_size == 0.0


def test_recycled_entry_detected():
    with pytest.raises(WindowReset):
        featurize([rec(1, 10, 100), rec(2, 2, 20, installed_s=1.5)])
    with pytest.raises(ValueError):
        featurize([rec(1, 1, 1)])


@given(st.lists(st.tuples(st.integers(0, 10_000), st.integers(0, 10**6)), min_size=2, max_size=6))
def test_rates_equal_delta_over_span(steps):
    pk = by = 0
    window = []
    for i, (dp, db) in enumerate(steps):
        pk += dp
        by += db
        window.append(rec(i + 1, pk, by))
    fv = featurize(window)
    span = len(steps) - 1
    assert fv.pckt_rate == pytest.approx((pk - window[0].pckt_count) / span)
    assert fv.byte_rate == pytest.approx((by - window[0].byte_count) / span)


def test_monitor_windows_and_fanin():
    topo = build_topology(edge_core_spec())
    net = Network(topo)
    for src in ("h3", "h5", "h6"):
        net.add_source(src, "h1", src, 0, ((i * 100_000, 200) for i in range(60)))
    mon = Monitor(net.controller, topo, window_polls=3)
    out = []
    for t in range(1, 5):
        net.engine.run_until(t * 1_000_000)
        out.append(mon.update(mon.poll(t * 1_000_000)))
    assert out[0] == [] and out[1] == []
    assert len(out[2]) == 3
    for key, fv in out[2]:
        assert fv.dst_fanin == 3 and fv.src_fanout == 1
        assert fv.pckt_rate == pytest.approx(10.0)
        assert fv.mean_pckt_size == 200.0
