"""End-to-end runs: traffic, monitoring, detection and mitigation on one topology."""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .automl import ModelSlot, SelectionOutcome, SelectionWeights, calibrate_weights, reselect_cycle
from .config import ScenarioConfig
from .control import FlowKey
from .datasets import Dataset, LabeledSample, dataset_filename, labeled_windows, load_csv, run_cell
from .defense import AlertEvent, AlertLog, GreedyDetector, MitigationAction, Mitigator, classify_vectors
from .ml import CostTimer, WallTimer
from .monitoring import Monitor
from .network import Network, RttSeries
from .report import DETECTION_HEADER, FLOWS_HEADER, SELECTION_HEADER, summarize
from .sim import Engine, build_topology, to_us
from .sim.packets import format_mac
from .traffic import AttackScenario, TrafficProfile, attack_plans, plan_flow

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    run_dir: Path
    rtt: RttSeries
    summary: dict[str, Any]
    selections: list[SelectionOutcome]
    actions: list[MitigationAction]


def bootstrap_dataset(cfg: ScenarioConfig) -> Dataset | None:
    """Labelled data the first detector is trained on, before any in-run window."""
    bs = cfg.automl.bootstrap
    if bs.source == "none":
        return None
    if bs.cell is not None:
        payload, speed = bs.cell
    else:
        # the dominant class of the configured normal traffic
        counts = Counter((f.payload, f.speed) for f in cfg.flows)
        payload, speed = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0] if counts else ("small", "low")
    if bs.source == "dir":
        path = Path(bs.datasets_dir) / dataset_filename(payload, speed)
        if not path.exists():
            raise FileNotFoundError(f"missing bootstrap dataset {path}")
        return load_csv(path)
    return run_cell(bs.baseline, payload, speed)


class _Selector:
    def __init__(self, cfg: ScenarioConfig, slot: ModelSlot):
        a = cfg.automl
        self.cfg = cfg
        self.slot = slot
        self.weights = SelectionWeights.uniform(a.alpha, a.beta)
        self.timer = CostTimer(a.seconds_per_op) if a.timing == "cost" else WallTimer()
        self.incumbent: SelectionOutcome | None = None
        self.history: list = []
        self.outcomes: list[SelectionOutcome] = []
        self.rows: list[list] = []

    def cycle(self, t: int, data: Dataset | None) -> None:
        if data is None:
            return
        weights = self.weights
        if self.cfg.automl.calibration == "per_state" and self.history:
            weights = calibrate_weights(self.history, "per_state",
                                        default=(self.cfg.automl.alpha, self.cfg.automl.beta)) \
                .for_state(self.incumbent.state if self.incumbent else None)
        outcome = reselect_cycle(data, weights, seed=self.cfg.seed + len(self.outcomes),
                                 hyperparameters=self.cfg.automl.hyperparameters,
                                 timer=self.timer, incumbent=self.incumbent,
                                 algorithms=self.cfg.automl.algorithms)
        if outcome is None or outcome is self.incumbent:
            return
        self.history.append((outcome.state, outcome.evaluations))
        for s, e in zip(outcome.scores, outcome.evaluations):
            self.rows.append([f"{t / 1e6:.6f}", s.algorithm, repr(e.accuracy), repr(e.detection_time),
                              repr(s.total), int(s.algorithm == outcome.algorithm)])
        self.slot.swap(outcome.algorithm, outcome.model)
        self.incumbent = outcome
        self.outcomes.append(outcome)
        log.info("t=%.0fs selected %s", t / 1e6, outcome.algorithm)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def run_scenario(cfg: ScenarioConfig, out_dir: str | Path | None = None,
                 on_network: Callable[[Network], None] | None = None) -> RunResult:
    """Run one scenario and write its logs. ``on_network`` sees the network
    before any traffic starts (for audit hooks)."""
    cfg.validate()
    run_dir = Path(out_dir if out_dir is not None else cfg.output_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    topo = build_topology(cfg.topology.spec())
    net = Network(topo, Engine())
    duration = to_us(cfg.duration_s)

    for i, f in enumerate(cfg.flows):
        profile = TrafficProfile(f.payload, f.speed, cfg.seed)
        stop = cfg.duration_s if f.stop_s is None else f.stop_s
        plan = plan_flow(profile, f.src, f.dst, to_us(f.start_s), to_us(stop), stream=i, label=0)
        net.add_source(plan.src, plan.dst, plan.flow_id, 0, plan.schedule())
    attack_keys: set[FlowKey] = set()
    for j, a in enumerate(cfg.attacks):
        scen = AttackScenario(a.target, tuple(a.bots), TrafficProfile(a.payload, a.speed, cfg.seed),
                              to_us(a.start_s), to_us(a.stop_s))
        for plan in attack_plans(scen, topo, stream_base=1_000_000 + 1000 * j):
            log.info("attack flow %s at %d pps", plan.flow_id, plan.rate_pps)
            net.add_source(plan.src, plan.dst, plan.flow_id, 1, plan.schedule())
            attack_keys.add(FlowKey(topo.mac(plan.src), topo.mac(plan.dst)))
    if on_network is not None:
        on_network(net)
    p = cfg.probe
    probe = net.ping(p.src, p.dst, p.interval_s, p.timeout_s, 0.0, cfg.duration_s)

    monitor = Monitor(net.controller, topo, cfg.window_polls)
    alerts = AlertLog()
    mode = cfg.defense.mode
    mitigator = greedy = selector = None
    slot = ModelSlot()
    bootstrap: Dataset | None = None
    if mode == "greedy":
        greedy = GreedyDetector(cfg.defense.greedy_threshold_pps)
        mitigator = Mitigator(net.controller, cfg.defense.greedy_hold_down_s, alerts)
    elif mode == "automl":
        mitigator = Mitigator(net.controller, cfg.defense.hold_down_s, alerts)
        selector = _Selector(cfg, slot)
        bootstrap = bootstrap_dataset(cfg)
        selector.cycle(0, bootstrap)
    buffer_us = to_us(cfg.automl.buffer_s)
    next_cycle = buffer_us
    window: list[LabeledSample] = []
    detections: list[list] = []

    step = to_us(cfg.poll_interval_s)
    t = step
    while t <= duration:
        net.engine.run_until(t)
        records = monitor.poll(t)
        vectors = monitor.update(records)
        if greedy is not None:
            for alert in greedy.tick(records):
                mitigator.mitigate(alert)
        elif selector is not None:
            window.extend(labeled_windows(vectors, net.ground_truth))
            current = slot.read()
            preds = classify_vectors(current, vectors)
            if preds is not None:
                for (key, fv), pred in zip(vectors, preds):
                    detections.append([f"{t / 1e6:.6f}", format_mac(key.eth_src), format_mac(key.eth_dst),
                                       int(pred), net.ground_truth[key]])
                    if pred == 1:
                        mitigator.mitigate(AlertEvent(t, key, current[0], fv))
            if t >= next_cycle:
                data = Dataset(window) if window else None
                if bootstrap is not None:
                    data = bootstrap + data if data is not None else bootstrap
                selector.cycle(t, data)
                window = []
                next_cycle += buffer_us
        t += step
    # let the last probes resolve; sources stop by the end of the run
    net.engine.run_until(duration + to_us(p.timeout_s))
    rtt = probe.series()

    rtt.to_csv(run_dir / "rtt.csv")
    alerts.to_csv(run_dir / "alerts.csv")
    _write_csv(run_dir / "selection.csv", SELECTION_HEADER, selector.rows if selector else [])
    _write_csv(run_dir / "detections.csv", DETECTION_HEADER, detections)
    _write_csv(run_dir / "flows.csv", FLOWS_HEADER,
               [[sw, s, d, pc, bc, f"{dur:.6f}"] for sw, s, d, pc, bc, dur in net.controller.dump_rows(duration)])
    meta = {
        "name": cfg.name,
        "seed": cfg.seed,
        "defense": mode,
        "duration_s": cfg.duration_s,
        "attack_window_s": list(cfg.attack_window) if cfg.attack_window else None,
        "attack_keys": sorted([format_mac(k.eth_src), format_mac(k.eth_dst)] for k in attack_keys),
        "probe": asdict(cfg.probe),
        "version": __version__,
        "config": asdict(cfg),
    }
    (run_dir / "run_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    summary = summarize(run_dir)
    (run_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return RunResult(run_dir, rtt, summary, selector.outcomes if selector else [],
                     mitigator.actions if mitigator else [])
