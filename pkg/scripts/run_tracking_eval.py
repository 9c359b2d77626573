#!/usr/bin/env python3
"""Sweep every built-in scenario through the full tracking stack and print
a compact comparison table (pose error, lost rate, latency percentiles).

Usage: python3 scripts/run_tracking_eval.py [--frames 500] [--seeds 0 1 2]
"""
from __future__ import annotations

import argparse

from lectern.bench import bench_tracking
from lectern.config import load_config
from lectern.simulator import scenario_names


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--frames", type=int, default=500)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0])
    parser.add_argument("--config", default=None)
    args = parser.parse_args()

    cfg = load_config(args.config)
    header = f"{'scenario':<10} {'seed':>4} {'tip_rmse_mm':>12} {'axis_rmse_deg':>14} {'lost_rate':>10} {'p50_ms':>7} {'p99_ms':>7}"
    print(header)
    print("-" * len(header))
    for name in scenario_names():
        for seed in args.seeds:
            report = bench_tracking(name, args.frames, cfg, seed=seed)
            total = report.latency_us["total"]
            print(
                f"{name:<10} {seed:>4} {report.tip_rmse_mm:>12.3f} {report.axis_rmse_deg:>14.3f}"
                f" {report.lost_rate:>10.4f} {total['p50'] / 1000:>7.2f} {total['p99'] / 1000:>7.2f}"
            )


if __name__ == "__main__":
    main()
