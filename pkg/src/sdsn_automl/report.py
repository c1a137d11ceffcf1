"""Run summaries recomputed from the raw logs of a run directory."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any

from .defense import ALERT_HEADER
from .network import RttSeries

SELECTION_HEADER = ["cycle_t_s", "algorithm", "accuracy", "detection_time_s", "total_score", "selected"]
DETECTION_HEADER = ["t_s", "eth_src", "eth_dst", "predicted", "label"]
FLOWS_HEADER = ["switch_id", "eth_src", "eth_dst", "pckt_count", "byte_count", "duration_s"]


class IntegrityError(RuntimeError):
    pass


def _read_csv(path: Path, header: list[str]) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != header:
        raise IntegrityError(f"{path.name}: line 1: expected header {','.join(header)}")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise IntegrityError(f"{path.name}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        out.append(dict(zip(header, row)))
    return out


def _r(x: float | None, nd: int = 6) -> float | None:
    return None if x is None else round(x, nd)


def _phase(series: RttSeries) -> dict[str, Any]:
    mean = series.mean_rtt_us()
    return {
        "probes": len(series),
        "timeouts": series.timeouts,
        "mean_rtt_ms": _r(mean / 1e3 if mean is not None else None),
    }


def summarize(run_dir: str | Path) -> dict[str, Any]:
    """Summary of one run, derived only from files in ``run_dir``."""
    run_dir = Path(run_dir)
    meta = json.loads((run_dir / "run_meta.json").read_text())
    try:
        rtt = RttSeries.from_csv(run_dir / "rtt.csv")
    except ValueError as e:
        raise IntegrityError(str(e)) from None
    alerts = _read_csv(run_dir / "alerts.csv", ALERT_HEADER)
    detections = _read_csv(run_dir / "detections.csv", DETECTION_HEADER)
    selections = _read_csv(run_dir / "selection.csv", SELECTION_HEADER)

    end = int(round(meta["duration_s"] * 1e6)) + 1
    window = meta.get("attack_window_s")
    out: dict[str, Any] = {
        "name": meta["name"],
        "defense": meta["defense"],
        "seed": meta["seed"],
        "probes": len(rtt),
        "timeouts": rtt.timeouts,
        "max_consecutive_timeouts": rtt.max_consecutive_timeouts(),
        "mean_rtt_ms": _r(rtt.mean_rtt_us() / 1e3 if rtt.mean_rtt_us() is not None else None),
    }
    if window:
        a, b = (int(round(v * 1e6)) for v in window)
        out["pre"] = _phase(rtt.between(0, a))
        out["during"] = _phase(rtt.between(a, b))
        out["post"] = _phase(rtt.between(b, end))
    else:
        out["pre"] = _phase(rtt)
        out["during"] = out["post"] = _phase(RttSeries())

    attack_keys = {tuple(k) for k in meta.get("attack_keys", [])}
    first_alert = None
    false_alerts = 0
    for row in alerts:
        if row["action"] != "ALERT":
            continue
        if (row["eth_src"], row["eth_dst"]) in attack_keys:
            t = float(row["t_s"])
            if window and t >= window[0] and (first_alert is None or t < first_alert):
                first_alert = t
        else:
            false_alerts += 1
    out["alerts"] = sum(r["action"] == "ALERT" for r in alerts)
    out["false_alerts"] = false_alerts
    out["detection_latency_s"] = _r(first_alert - window[0]) if first_alert is not None else None

    per_class: dict[str, float | None] = {}
    for label, name in ((0, "normal"), (1, "ddos")):
        rows = [r for r in detections if int(r["label"]) == label]
        hits = sum(int(r["predicted"]) == label for r in rows)
        per_class[name] = _r(hits / len(rows)) if rows else None
    out["per_class_accuracy"] = per_class
    out["detections"] = len(detections)

    cycles: dict[str, list[dict[str, str]]] = {}
    for r in selections:
        cycles.setdefault(r["cycle_t_s"], []).append(r)
    chosen = []
    for t, rows in cycles.items():
        winners = [r["algorithm"] for r in rows if r["selected"] == "1"]
        if len(winners) != 1:
            raise IntegrityError(f"selection.csv: cycle {t} has {len(winners)} selected rows")
        chosen.append([float(t), winners[0]])
    out["selections"] = chosen
    return out


def _equal(a, b) -> bool:
    if isinstance(a, float) and isinstance(b, float):
        return math.isclose(a, b, rel_tol=0, abs_tol=1e-9)
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_equal(a[k], b[k]) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_equal(x, y) for x, y in zip(a, b))
    return a == b


def verify(run_dir: str | Path) -> dict[str, Any]:
    """Recompute the summary and compare it with the stored one."""
    run_dir = Path(run_dir)
    path = run_dir / "summary.json"
    if not path.exists():
        raise IntegrityError(f"{run_dir}: no summary.json")
    stored = json.loads(path.read_text())
    fresh = summarize(run_dir)
    if not _equal(stored, fresh):
        diff = sorted(k for k in set(stored) | set(fresh) if not _equal(stored.get(k), fresh.get(k)))
        raise IntegrityError(f"{run_dir}: summary.json disagrees with raw logs on {', '.join(diff)}")
    return fresh


def write_plot_data(run_dirs: list[str | Path], out_dir: str | Path) -> list[Path]:
    """Plot-ready tables: RTT over time per run plus one comparison row per run."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rtt_path = out_dir / "rtt_timeseries.csv"
    cmp_path = out_dir / "comparison.csv"
    with open(rtt_path, "w", newline="") as fr, open(cmp_path, "w", newline="") as fc:
        wr = csv.writer(fr, lineterminator="\n")
        wc = csv.writer(fc, lineterminator="\n")
        wr.writerow(["run", "defense", "t_s", "rtt_ms", "timeout"])
        wc.writerow(["run", "defense", "pre_rtt_ms", "during_rtt_ms", "post_rtt_ms", "timeouts",
                     "max_consecutive_timeouts", "detection_latency_s", "false_alerts"])
        for d in run_dirs:
            d = Path(d)
            s = verify(d)
            for t, r in RttSeries.from_csv(d / "rtt.csv").probes:
                wr.writerow([s["name"], s["defense"], f"{t / 1e6:.6f}",
                             "" if r is None else f"{r / 1e3:.6f}", int(r is None)])
            wc.writerow([s["name"], s["defense"], s["pre"]["mean_rtt_ms"], s["during"]["mean_rtt_ms"],
                         s["post"]["mean_rtt_ms"], s["timeouts"], s["max_consecutive_timeouts"],
                         s["detection_latency_s"], s["false_alerts"]])
    return [rtt_path, cmp_path]
