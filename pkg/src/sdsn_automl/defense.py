"""Detection, mitigation and the threshold ("greedy") baseline."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .automl import ModelSlot
from .control import Controller, FlowKey, FlowStatsRecord
from .ml import TrainedModel
from .monitoring import FeatureVector
from .sim.engine import to_us
from .sim.packets import format_mac

log = logging.getLogger(__name__)

GREEDY = "greedy"
ALERT_HEADER = ["t_s", "eth_src", "eth_dst", "model", "action"]


@dataclass(frozen=True)
class AlertEvent:
    at: int
    key: FlowKey
    model: str
    features: FeatureVector | None = None
    predicted_label: int = 1

    def __post_init__(self):
        if self.predicted_label != 1:
            raise ValueError("alerts are only raised for predicted label 1")


def _resolve(model) -> tuple[str, TrainedModel] | None:
    if isinstance(model, ModelSlot):
        return model.read()
    if isinstance(model, TrainedModel):
        return model.algorithm, model
    return model


def classify_vectors(model, vectors: Sequence[tuple[FlowKey, FeatureVector]]) -> np.ndarray | None:
    """Predicted labels for ``vectors`` in order, or None without a model."""
    current = _resolve(model)
    if current is None:
        return None
    if not vectors:
        return np.zeros(0, dtype=int)
    return current[1].predict(np.array([fv for _, fv in vectors], dtype=float))


def detect_tick(model, live_vectors: Sequence[tuple[FlowKey, FeatureVector]], t: int) -> list[AlertEvent]:
    """One prediction per live flow vector; alerts for the keys predicted DDoS."""
    current = _resolve(model)
    if current is None:
        log.warning("detection tick at %d us with no model installed", t)
        return []
    preds = classify_vectors(current, live_vectors)
    return [AlertEvent(t, key, current[0], fv) for (key, fv), p in zip(live_vectors, preds) if p == 1]


@dataclass(frozen=True)
class MitigationAction:
    key: FlowKey
    at: int
    deleted_on: tuple[str, ...]
    expires_at: int
    extended: bool


class AlertLog:
    def __init__(self):
        self.rows: list[tuple[int, FlowKey, str, str]] = []

    def add(self, t: int, key: FlowKey, model: str, action: str) -> None:
        self.rows.append((t, key, model, action))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(ALERT_HEADER)
            for t, key, model, action in self.rows:
                w.writerow([f"{t / 1e6:.6f}", format_mac(key.eth_src), format_mac(key.eth_dst), model, action])


class Mitigator:
    """Deletes an alerted key on every switch holding it and refuses to
    reinstall it until the hold-down expires."""

    def __init__(self, controller: Controller, hold_down_s: float = 30.0, alert_log: AlertLog | None = None):
        if hold_down_s <= 0:
            raise ValueError("hold-down must be positive")
        self.controller = controller
        self.hold_down_us = to_us(hold_down_s)
        self.log = alert_log if alert_log is not None else AlertLog()
        self.actions: list[MitigationAction] = []
        self._cause: dict[FlowKey, str] = {}
        controller.on_readmit.append(self._readmitted)

    def _readmitted(self, key: FlowKey, t: int) -> None:
        self.log.add(t, key, self._cause.get(key, ""), "READMIT")

    def mitigate(self, alert: AlertEvent) -> MitigationAction:
        t = alert.at
        self.log.add(t, alert.key, alert.model, "ALERT")
        deleted = tuple(sw for sw in self.controller.switches_holding(alert.key)
                        if self.controller.delete_flow(sw, alert.key, t))
        if deleted:
            self.log.add(t, alert.key, alert.model, "DEL")
        extended = self.controller.hold(alert.key, t + self.hold_down_us)
        self._cause[alert.key] = alert.model
        action = MitigationAction(alert.key, t, deleted, self.controller.hold_downs[alert.key], extended)
        self.actions.append(action)
        return action


def _rate(rec: FlowStatsRecord, prev: FlowStatsRecord | None) -> float:
    if prev is not None and prev.installed_at == rec.installed_at and rec.pckt_count >= prev.pckt_count:
        return (rec.pckt_count - prev.pckt_count) / ((rec.polled_at - prev.polled_at) / 1e6)
    # entry new since the last poll: average since installation
    return rec.pckt_count / rec.duration if rec.duration_us > 0 else 0.0


def greedy_detect(records: Sequence[FlowStatsRecord], threshold: float,
                  previous: Sequence[FlowStatsRecord] = ()) -> list[AlertEvent]:
    """Alert every key whose per-switch packet rate since the previous poll
    exceeds ``threshold`` packets per second. No model, no training."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    prev = {(r.switch_id, r.key): r for r in previous}
    alerted: dict[FlowKey, AlertEvent] = {}
    for r in records:
        if r.key not in alerted and _rate(r, prev.get((r.switch_id, r.key))) > threshold:
            alerted[r.key] = AlertEvent(r.polled_at, r.key, GREEDY)
    return list(alerted.values())


class GreedyDetector:
    def __init__(self, threshold: float = 1000.0):
        if threshold <= 0:
            raise ValueError("threshold must be positive")
        self.threshold = threshold
        self._previous: Sequence[FlowStatsRecord] = ()

    def tick(self, records: Sequence[FlowStatsRecord]) -> list[AlertEvent]:
        alerts = greedy_detect(records, self.threshold, self._previous)
        self._previous = records
        return alerts
