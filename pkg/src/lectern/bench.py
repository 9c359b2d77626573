"""Tracking benchmark: runs the simulator through the vision pipeline and
the hybrid fuser, scoring per-frame pose error against ground truth and
collecting per-stage latency percentiles against the 70 Hz budget.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import AppConfig
from .geometry import angle_between_deg
from .hybrid import BlendConfig, PoseFuser
from .simulator import (
    StylusModel,
    default_rig,
    make_scenario,
    run_scenario,
)
from .vision import VisionTracker

STAGES = ("segment", "icp", "reconstruct", "pca", "kalman", "fuse")


@dataclass
class FrameRecord:
    frame: int
    tip_err_mm: float        # vision pipeline error; NaN when lost
    axis_err_deg: float
    lost: bool
    coasting: bool
    source: str
    fused_tip_err_mm: float
    stage_times_us: dict[str, float]

    @property
    def total_us(self) -> float:
        return sum(self.stage_times_us.values())


@dataclass
class BenchReport:
    scenario: str
    frames: int
    records: list[FrameRecord]
    tip_rmse_mm: float
    axis_rmse_deg: float
    lost_rate: float
    max_coast_run: int
    latency_us: dict[str, dict[str, float]] = field(default_factory=dict)

    def summary_lines(self) -> list[str]:
        lines = [
            f"scenario={self.scenario} frames={self.frames}",
            f"tip_rmse_mm={self.tip_rmse_mm:.3f} axis_rmse_deg={self.axis_rmse_deg:.3f}",
            f"lost_rate={self.lost_rate:.4f} max_coast_run={self.max_coast_run}",
        ]
        for stage, pct in self.latency_us.items():
            lines.append(
                f"latency[{stage}]_us p50={pct['p50']:.0f} p90={pct['p90']:.0f} p99={pct['p99']:.0f}"
            )
        return lines


def _percentile(sorted_values: list[float], q: float) -> float:
    if not sorted_values:
        return float("nan")
    idx = min(len(sorted_values) - 1, max(0, math.ceil(q * len(sorted_values)) - 1))
    return sorted_values[idx]


def bench_tracking(scenario_name: str, frames: int, cfg: AppConfig = AppConfig(), seed: int = 0) -> BenchReport:
    """Run scenario -> vision tracker -> hybrid fuser; raises UnknownScenario."""
    scenario = make_scenario(scenario_name, seed=seed)
    rig = default_rig(cfg.camera)
    model = StylusModel.default()
    tracker = VisionTracker(rig, model, cfg.tracker, dt=1.0 / cfg.sim.frame_rate_hz)
    fuser = PoseFuser(BlendConfig.from_fusion(cfg.fusion))

    records: list[FrameRecord] = []
    sq_tip = 0.0
    sq_axis = 0.0
    scored = 0
    lost = 0
    coast_run = 0
    max_coast_run = 0

    for frame, reading in run_scenario(scenario, frames, rig=rig, model=model, sim_cfg=cfg.sim):
        result = tracker.track(frame)
        t0 = time.perf_counter_ns()
        fused = fuser.fuse(reading, result)
        fuse_us = (time.perf_counter_ns() - t0) / 1000.0

        times = dict(result.diagnostics.stage_times_us)
        times["fuse"] = fuse_us

        tip_err = axis_err = float("nan")
        if result.pose is not None:
            tip_err = (result.pose.tip - frame.truth.tip).norm() * 1000.0
            axis_err = angle_between_deg(result.pose.axis, frame.truth.axis)
            sq_tip += tip_err * tip_err
            sq_axis += axis_err * axis_err
            scored += 1
        fused_err = float("nan")
        if fused.pose is not None:
            fused_err = (fused.pose.tip - frame.truth.tip).norm() * 1000.0

        if result.lost:
            lost += 1
        if result.diagnostics.coasting:
            coast_run += 1
            max_coast_run = max(max_coast_run, coast_run)
        else:
            coast_run = 0

        records.append(
            FrameRecord(
                frame=frame.frame_index,
                tip_err_mm=tip_err,
                axis_err_deg=axis_err,
                lost=result.lost,
                coasting=result.diagnostics.coasting,
                source=fused.source,
                fused_tip_err_mm=fused_err,
                stage_times_us=times,
            )
        )

    latency: dict[str, dict[str, float]] = {}
    for stage in STAGES:
        values = sorted(r.stage_times_us.get(stage, 0.0) for r in records)
        latency[stage] = {q: _percentile(values, p) for q, p in (("p50", 0.5), ("p90", 0.9), ("p99", 0.99))}
    totals = sorted(r.total_us for r in records)
    latency["total"] = {q: _percentile(totals, p) for q, p in (("p50", 0.5), ("p90", 0.9), ("p99", 0.99))}

    return BenchReport(
        scenario=scenario_name,
        frames=frames,
        records=records,
        tip_rmse_mm=math.sqrt(sq_tip / scored) if scored else float("nan"),
        axis_rmse_deg=math.sqrt(sq_axis / scored) if scored else float("nan"),
        lost_rate=lost / len(records) if records else 0.0,
        max_coast_run=max_coast_run,
        latency_us=latency,
    )


def write_csv(report: BenchReport, path: str | Path) -> None:
    """Per-frame rows: frame, tip_err_mm, axis_err_deg, lost, stage_times_us..."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["frame", "tip_err_mm", "axis_err_deg", "lost"]
            + [f"t_{s}_us" for s in STAGES]
            + ["t_total_us", "source", "fused_tip_err_mm", "coasting"]
        )
        for r in report.records:
            writer.writerow(
                [r.frame, f"{r.tip_err_mm:.3f}", f"{r.axis_err_deg:.3f}", int(r.lost)]
                + [f"{r.stage_times_us.get(s, 0.0):.1f}" for s in STAGES]
                + [f"{r.total_us:.1f}", r.source, f"{r.fused_tip_err_mm:.3f}", int(r.coasting)]
            )
