"""Discrete-event software-defined sensor network simulator with a
network-aware AutoML DDoS defense (monitoring, model selection, detection,
mitigation)."""

__version__ = "0.1.0"
