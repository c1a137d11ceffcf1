#!/usr/bin/env python3
"""Run the testbed scenario under all three defenses and compare them.

    python scripts/run_scenarios.py [configs/scenario.yaml] [--out runs] [--seed N]
"""

import argparse
import logging
import time
from pathlib import Path

from sdsn_automl.config import load_scenario
from sdsn_automl.report import write_plot_data
from sdsn_automl.scenario import run_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default="configs/scenario.yaml")
    ap.add_argument("--out", default="runs")
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)

    dirs = []
    for mode in ("none", "greedy", "automl"):
        overrides = {"defense.mode": mode}
        if args.seed is not None:
            overrides["seed"] = args.seed
        cfg = load_scenario(args.config, overrides)
        t0 = time.perf_counter()
        res = run_scenario(cfg, Path(args.out) / mode)
        s = res.summary
        print(f"{mode:7s} {time.perf_counter() - t0:5.1f}s  timeouts={s['timeouts']:3d} "
              f"max_run={s['max_consecutive_timeouts']:3d}  "
              f"rtt_ms pre={s['pre']['mean_rtt_ms']} during={s['during']['mean_rtt_ms']} "
              f"post={s['post']['mean_rtt_ms']}  latency={s['detection_latency_s']}")
        dirs.append(res.run_dir)
    for p in write_plot_data(dirs, Path(args.out) / "plots"):
        print("wrote", p)


if __name__ == "__main__":
    main()
