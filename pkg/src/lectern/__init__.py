"""Hybrid stylus pose tracking on synthetic stereo IR frames plus a
lecture-time-stamped note engine behind a local session service."""

from .config import AppConfig, load_config
from .geometry import (
    CameraIntrinsics,
    Plane,
    StereoRig,
    StylusPose,
    Vec3,
)
from .hybrid import BlendConfig, FusedPose, PoseFuser, fuse_stream
from .notes import NoteEngine, Notebook, Selection, Stroke
from .session import Session, SessionEvent, replay_text
from .simulator import (
    SimScenario,
    StereoFrame,
    StylusModel,
    TabletReading,
    default_rig,
    make_scenario,
    render_stereo,
    run_scenario,
    tablet_sample,
)
from .vision import TrackResult, VisionTracker, track_frame

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "BlendConfig",
    "CameraIntrinsics",
    "FusedPose",
    "NoteEngine",
    "Notebook",
    "Plane",
    "PoseFuser",
    "Selection",
    "Session",
    "SessionEvent",
    "SimScenario",
    "StereoFrame",
    "StereoRig",
    "Stroke",
    "StylusModel",
    "StylusPose",
    "TabletReading",
    "TrackResult",
    "Vec3",
    "VisionTracker",
    "default_rig",
    "fuse_stream",
    "load_config",
    "make_scenario",
    "render_stereo",
    "replay_text",
    "run_scenario",
    "tablet_sample",
    "track_frame",
    "__version__",
]
