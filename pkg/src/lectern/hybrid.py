"""Per-frame source selection between the tablet reading and the vision
track, with a short linear blend across switchovers.

The tablet wins whenever it reports hover; otherwise the vision result
is used. On a source change the output decays the offset between the
last emitted pose and the new source over ``window_frames`` blending
frames, which keeps the tip trajectory continuous even when the old
source vanishes at the instant of the switch.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .config import FusionConfig
from .geometry import StylusPose, Vec3
from .simulator import TabletReading
from .vision import TrackResult

SOURCE_TABLET = "tablet"
SOURCE_VISION = "vision"
SOURCE_BLENDING = "blending"
SOURCE_LOST = "lost"


@dataclass(frozen=True)
class BlendConfig:
    window_frames: int = 5

    def __post_init__(self) -> None:
        if self.window_frames < 1:
            raise ValueError("window_frames must be >= 1")

    @classmethod
    def from_fusion(cls, cfg: FusionConfig) -> "BlendConfig":
        return cls(window_frames=cfg.blend_window_frames)


@dataclass(frozen=True)
class FusedPose:
    pose: StylusPose | None
    source: str
    blend_progress: float = 0.0


@dataclass
class _Blend:
    target: str
    offset: np.ndarray      # last output tip minus target tip at the switch
    from_axis: Vec3         # output axis at the switch
    step: int = 0


def _nlerp_axis(from_axis: Vec3, target_axis: Vec3, alpha: float) -> Vec3:
    a = from_axis
    if a.dot(target_axis) < 0:
        a = a.scaled(-1.0)
    mixed = a.scaled(1.0 - alpha) + target_axis.scaled(alpha)
    if mixed.norm() < 1e-12:
        return target_axis
    return mixed.normalized()


class PoseFuser:
    """Sequential fuse state machine; one owner, frames in order."""

    def __init__(self, cfg: BlendConfig = BlendConfig()) -> None:
        self.cfg = cfg
        self._steady: str | None = None
        self._blend: _Blend | None = None
        self._last_pose: StylusPose | None = None

    def fuse(self, tablet: TabletReading, vision: TrackResult) -> FusedPose:
        if tablet.hover and tablet.pose is not None:
            target, target_pose = SOURCE_TABLET, tablet.pose
        elif not vision.lost and vision.pose is not None:
            target, target_pose = SOURCE_VISION, vision.pose
        else:
            # both unavailable: hold the last pose
            self._blend = None
            self._steady = None
            return FusedPose(self._last_pose, SOURCE_LOST)

        if self._last_pose is None:
            out = FusedPose(target_pose, target)
        elif self._blend is not None and self._blend.target == target:
            out = self._advance_blend(target_pose)
        elif self._steady == target and self._blend is None:
            out = FusedPose(target_pose, target)
        else:
            # source change (or retarget mid-blend): restart from the last output
            self._blend = _Blend(
                target=target,
                offset=self._last_pose.tip.as_array() - target_pose.tip.as_array(),
                from_axis=self._last_pose.axis,
            )
            out = self._advance_blend(target_pose)

        if out.source != SOURCE_BLENDING:
            self._steady = out.source
            self._blend = None
        self._last_pose = out.pose
        return out

    def _advance_blend(self, target_pose: StylusPose) -> FusedPose:
        blend = self._blend
        blend.step += 1
        window = self.cfg.window_frames
        if blend.step > window:
            return FusedPose(target_pose, blend.target)
        alpha = blend.step / (window + 1)
        tip = Vec3.from_array(target_pose.tip.as_array() + (1.0 - alpha) * blend.offset)
        axis = _nlerp_axis(blend.from_axis, target_pose.axis, alpha)
        return FusedPose(StylusPose(tip, axis), SOURCE_BLENDING, blend_progress=alpha)


def fuse_stream(
    frames: Iterable[tuple[TabletReading, TrackResult]],
    cfg: BlendConfig = BlendConfig(),
) -> Iterator[FusedPose]:
    """Fuse a whole (tablet, vision) stream with carried blend state."""
    fuser = PoseFuser(cfg)
    for tablet, vision in frames:
        yield fuser.fuse(tablet, vision)
