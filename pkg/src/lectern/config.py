"""Runtime tunables as plain dataclasses, loadable from a JSON file.

The config file path comes from ``--config`` on the CLI or the
``LECTERN_CONFIG`` environment variable; every field defaults to the
values used throughout the test suite.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

ENV_CONFIG_PATH = "LECTERN_CONFIG"


@dataclass(frozen=True)
class CameraConfig:
    fx: float = 240.0
    fy: float = 240.0
    cx: float = 320.0
    cy: float = 120.0
    width: int = 640
    height: int = 240
    baseline_m: float = 0.04


@dataclass(frozen=True)
class TrackerConfig:
    segment_threshold: int = 250
    epipolar_band_px: float = 2.0
    icp_max_iters: int = 20
    icp_tol_px: float = 0.05
    min_disparity_px: float = 0.5
    min_points: int = 10
    min_elongation: float = 4.0
    coast_frames: int = 7
    # process noise per frame step; measurement noise per observation
    process_sigma_pos_m: float = 0.0005
    process_sigma_vel_mps: float = 0.01
    process_sigma_axis: float = 0.02
    meas_sigma_pos_m: float = 0.002
    meas_sigma_axis: float = math.radians(2.0)


@dataclass(frozen=True)
class FusionConfig:
    blend_window_frames: int = 5


@dataclass(frozen=True)
class SimConfig:
    frame_rate_hz: float = 70.0
    hover_range_m: float = 0.01
    tablet_noise_sigma_m: float = 0.0002
    splat_sigma_px: float = 0.7
    background_max: int = 80


@dataclass(frozen=True)
class NotebookConfig:
    page_width_mm: float = 210.0
    page_height_mm: float = 297.0
    pen_width_mm: float = 1.2
    marker_width_mm: float = 4.0
    # page delta applied for a leftward swipe; rightward swipe applies the negative
    swipe_left_delta: int = 1


@dataclass(frozen=True)
class AppConfig:
    camera: CameraConfig = field(default_factory=CameraConfig)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    notebook: NotebookConfig = field(default_factory=NotebookConfig)


_SECTIONS = {
    "camera": CameraConfig,
    "tracker": TrackerConfig,
    "fusion": FusionConfig,
    "sim": SimConfig,
    "notebook": NotebookConfig,
}


def _merge_section(default, overrides: dict, section: str):
    known = {f.name for f in fields(default)}
    unknown = set(overrides) - known
    if unknown:
        raise ValueError(f"unknown config keys in [{section}]: {sorted(unknown)}")
    return replace(default, **overrides)


def load_config(path: str | os.PathLike | None = None) -> AppConfig:
    """Build an AppConfig from a JSON file, the env var, or pure defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH)
    cfg = AppConfig()
    if not path:
        return cfg
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    merged = {
        name: _merge_section(getattr(cfg, name), raw.get(name, {}), name)
        for name in _SECTIONS
    }
    return AppConfig(**merged)
