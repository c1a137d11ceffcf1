#!/usr/bin/env python3
"""Automl scenario across buffer periods: how often the detector is re-picked
and what it costs in RTT and detection latency."""

import argparse

from sdsn_automl.config import load_scenario
from sdsn_automl.scenario import run_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default="configs/scenario.yaml")
    ap.add_argument("--out", default="runs/buffer_sweep")
    ap.add_argument("--buffers", type=float, nargs="+", default=[60, 120, 300])
    args = ap.parse_args()
    for b in args.buffers:
        cfg = load_scenario(args.config, {"defense.mode": "automl", "automl.buffer_s": b})
        s = run_scenario(cfg, f"{args.out}/buffer_{int(b)}").summary
        picks = ", ".join(f"{t:.0f}s:{a}" for t, a in s["selections"])
        print(f"buffer={b:5.0f}s  during_rtt_ms={s['during']['mean_rtt_ms']}  "
              f"timeouts={s['timeouts']}  picks=[{picks}]")


if __name__ == "__main__":
    main()
