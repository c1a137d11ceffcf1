"""Command-line front end: ``sdsn gen-data | train-eval | run | report``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .automl import stratified_split
from .config import ConfigError, load_baseline, load_scenario
from .datasets import DatasetError, build_baseline_datasets, load_baseline_dir
from .ml import ALGORITHMS, CostTimer, WallTimer, evaluate, train
from .report import IntegrityError, verify, write_plot_data
from .scenario import run_scenario
from .traffic import CELLS

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_INTEGRITY = 0, 1, 2, 3
EVAL_HEADER = ["dataset", "algorithm", "accuracy", "detection_time_s", "n_test"]


def cmd_gen_data(args) -> int:
    overrides = {"seed": args.seed} if args.seed is not None else {}
    cfg = load_baseline(args.config, overrides)
    out = Path(args.out or "data/baseline")
    sets = build_baseline_datasets(cfg, out)
    for (p, s), ds in sets.items():
        n0, n1 = ds.label_counts()
        print(f"baseline_{p}_{s}.csv: {len(ds)} samples ({n0} normal, {n1} ddos)")
    return EXIT_OK


def train_eval_table(datasets_dir, seed: int = 0, timing: str = "wall") -> list[list]:
    """Six algorithms on each of the nine datasets: 70/30 stratified split,
    accuracy and detection time on the held-out 30%."""
    sets = load_baseline_dir(datasets_dir)
    timer = WallTimer() if timing == "wall" else CostTimer()
    rows = []
    for p, s in CELLS:
        ds = sets[(p, s)]
        X, y = ds.X, ds.y
        tr, va = stratified_split(y, 0.7, seed)
        for a in ALGORITHMS:
            model = train(a, (X[tr], y[tr]), seed=seed)
            r = evaluate(model, (X[va], y[va]), timer)
            rows.append([f"{p}_{s}", a, repr(r.accuracy), repr(r.detection_time), r.n_test])
    return rows


def cmd_train_eval(args) -> int:
    rows = train_eval_table(args.datasets_dir, args.seed or 0, args.timing)
    out = Path(args.out or Path(args.datasets_dir) / "evaluation.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVAL_HEADER)
        w.writerows(rows)
    print(f"{len(rows)} rows -> {out}")
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.defense is not None:
        overrides["defense.mode"] = args.defense
    if args.buffer_s is not None:
        overrides["automl.buffer_s"] = args.buffer_s
    cfg = load_scenario(args.config, overrides)
    result = run_scenario(cfg, args.out)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    for d in args.run_dirs:
        s = verify(d)
        during = s["during"]["mean_rtt_ms"]
        print(f"{d}: defense={s['defense']} timeouts={s['timeouts']} "
              f"(max run {s['max_consecutive_timeouts']}) pre={s['pre']['mean_rtt_ms']} ms "
              f"during={during} ms post={s['post']['mean_rtt_ms']} ms "
              f"latency={s['detection_latency_s']} s")
    out = args.out or Path(args.run_dirs[0]) / "plots"
    for p in write_plot_data(args.run_dirs, out):
        print(f"wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sdsn", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate the nine baseline datasets")
    g.add_argument("config")
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train-eval", help="evaluate all algorithms on the nine datasets")
    t.add_argument("datasets_dir")
    t.add_argument("--seed", type=int)
    t.add_argument("--out")
    t.add_argument("--timing", choices=["wall", "cost"], default="wall")
    t.set_defaults(func=cmd_train_eval)

    r = sub.add_parser("run", help="run one end-to-end scenario")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--defense", choices=["none", "greedy", "automl"])
    r.add_argument("--buffer-s", type=float)
    r.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="verify run summaries and write plot-ready CSVs")
    p.add_argument("run_dirs", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrityError as e:
        print(f"integrity failure: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (DatasetError, FileNotFoundError, OSError, ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
