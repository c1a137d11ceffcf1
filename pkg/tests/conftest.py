import sys
import time
from pathlib import Path

import pytest

from sdsn_automl.config import load_baseline, load_scenario
from sdsn_automl.datasets import build_baseline_datasets
from sdsn_automl.scenario import run_scenario

ROOT = Path(__file__).resolve().parents[1]
SCENARIO = ROOT / "configs" / "scenario.yaml"
BASELINE = ROOT / "configs" / "baseline.yaml"


class Audit:
    """Switch forwards and flow deletions seen during a run."""

    def __init__(self):
        self.forwards: dict = {}
        self.deleted: list = []

    def attach(self, net):
        def fwd(t, sw, key, packet):
            self.forwards.setdefault(key, []).append(t)
        net.forward_hook = fwd
        net.controller.on_delete.append(lambda sw, key, t: self.deleted.append((t, sw, key)))


def audited_run(mode, out_dir, **overrides):
    audit = Audit()
    cfg = load_scenario(SCENARIO, {"defense.mode": mode, **overrides})
    t0 = time.perf_counter()
    res = run_scenario(cfg, out_dir, on_network=audit.attach)
    res.elapsed = time.perf_counter() - t0
    res.audit = audit
    return res


@pytest.fixture(scope="session")
def baseline_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("baseline")
    build_baseline_datasets(load_baseline(BASELINE), out)
    return out


@pytest.fixture(scope="session")
def scenario_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("runs")
    return {mode: audited_run(mode, root / mode) for mode in ("none", "greedy", "automl")}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, title, detail = results[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {title}" + (f": {detail}" if detail else ""))
