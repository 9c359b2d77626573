"""Deterministic synthetic scene generator: stereo IR frames of a
tape-wrapped stylus, tablet hover readings, and ground-truth poses.

The stylus is modeled as a cylinder with a retro-reflective band; the
band renders as a saturated capsule in each camera with a Gaussian
edge falloff, on top of dim uniform background noise. Everything is a
pure function of (scenario parameters, seed, frame index), so frame
sequences are bit-identical across runs and platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .config import CameraConfig, SimConfig
from .geometry import (
    CameraIntrinsics,
    Plane,
    RigidTransform,
    StereoRig,
    StylusPose,
    Vec3,
)

TABLET_PLANE = Plane(point=Vec3(0.0, 0.0, 0.0), normal=Vec3(0.0, 0.0, 1.0))

# axial sample spacing along the tape centerline, meters
_SAMPLE_STEP_M = 0.00075


class StylusOutOfView(RuntimeError):
    """No tape sample projects inside either camera image."""

    def __init__(self, message: str, frame_index: int | None = None) -> None:
        super().__init__(message)
        self.frame_index = frame_index


class UnknownScenario(ValueError):
    pass


@dataclass(frozen=True)
class StylusModel:
    """Cylindrical stylus with an IR-reflective band along part of its length."""

    length: float
    radius: float
    tape_start: float
    tape_end: float
    tip_offset: float

    def __post_init__(self) -> None:
        if self.length <= 0 or self.radius <= 0:
            raise ValueError("length and radius must be positive")
        if not (0.0 <= self.tape_start < self.tape_end <= 1.0):
            raise ValueError("tape band must satisfy 0 <= start < end <= 1")

    @classmethod
    def default(cls) -> "StylusModel":
        length = 0.14
        tape_start, tape_end = 0.30, 0.80
        return cls(
            length=length,
            radius=0.004,
            tape_start=tape_start,
            tape_end=tape_end,
            tip_offset=0.5 * (tape_start + tape_end) * length,
        )


@dataclass
class StereoFrame:
    left: np.ndarray
    right: np.ndarray
    truth: StylusPose
    frame_index: int


@dataclass
class TabletReading:
    hover: bool
    pose: StylusPose | None
    noise_sigma: float


@dataclass(frozen=True)
class SimScenario:
    """A named, seeded trajectory plus per-frame occlusion and image noise."""

    name: str
    trajectory: Callable[[int], StylusPose]
    occlusion_fraction: Callable[[int], float]
    pixel_noise_sigma: float
    seed: int


def default_rig(camera: CameraConfig = CameraConfig()) -> StereoRig:
    """Head-mounted rig above the desk, looking down at the writing area."""
    intrinsics = CameraIntrinsics(
        fx=camera.fx, fy=camera.fy, cx=camera.cx, cy=camera.cy,
        width=camera.width, height=camera.height,
    )
    pose = RigidTransform.look_at(eye=Vec3(0.0, -0.32, 0.30), target=Vec3(0.0, 0.06, 0.0))
    return StereoRig(intrinsics=intrinsics, baseline=camera.baseline_m, rig_pose=pose)


def _visible_centerline(truth: StylusPose, model: StylusModel, occlusion_fraction: float) -> np.ndarray:
    """World-frame sample points along the unoccluded part of the tape band."""
    f = min(1.0, max(0.0, occlusion_fraction))
    s0 = model.tape_start + f * (model.tape_end - model.tape_start)
    s1 = model.tape_end
    if s1 - s0 < 1e-9:
        return np.zeros((0, 3))
    span_m = (s1 - s0) * model.length
    n = max(2, int(math.ceil(span_m / _SAMPLE_STEP_M)) + 1)
    s = np.linspace(s0, s1, n) * model.length
    tip = truth.tip.as_array()
    axis = truth.axis.as_array()
    return tip[None, :] + s[:, None] * axis[None, :]


def _render_camera(
    centerline_world: np.ndarray,
    radius: float,
    rig: StereoRig,
    right: bool,
    rng: np.random.Generator,
    pixel_noise_sigma: float,
    sim_cfg: SimConfig,
) -> tuple[np.ndarray, int]:
    """Render one camera image; returns (uint8 image, samples landing in-frame)."""
    k = rig.intrinsics
    h, w = k.height, k.width
    sigma = sim_cfg.splat_sigma_px

    band = None
    n_visible = 0
    if len(centerline_world):
        cam = rig.world_to_right(centerline_world) if right else np.atleast_2d(rig.world_to_left(centerline_world))
        cam = cam[cam[:, 2] > 0.02]
        if len(cam):
            u = k.fx * cam[:, 0] / cam[:, 2] + k.cx
            v = k.fy * cam[:, 1] / cam[:, 2] + k.cy
            rad_px = k.fx * radius / cam[:, 2]
            pad = rad_px + 3.0 * sigma
            near = (u > -pad) & (u < w - 1 + pad) & (v > -pad) & (v < h - 1 + pad)
            n_visible = int(np.count_nonzero(
                (np.rint(u) >= 0) & (np.rint(u) < w) & (np.rint(v) >= 0) & (np.rint(v) < h)
            ))
            u, v, rad_px = u[near], v[near], rad_px[near]
            if len(u):
                pad_max = float(np.max(rad_px)) + 3.0 * sigma + 1.0
                u0 = max(0, int(math.floor(np.min(u) - pad_max)))
                u1 = min(w - 1, int(math.ceil(np.max(u) + pad_max)))
                v0 = max(0, int(math.floor(np.min(v) - pad_max)))
                v1 = min(h - 1, int(math.ceil(np.max(v) + pad_max)))
                if u1 >= u0 and v1 >= v0:
                    pu = np.arange(u0, u1 + 1, dtype=float)
                    pv = np.arange(v0, v1 + 1, dtype=float)
                    du = pu[None, :, None] - u[None, None, :]
                    dv = pv[:, None, None] - v[None, None, :]
                    dist = np.sqrt(du * du + dv * dv) - rad_px[None, None, :]
                    d = np.clip(dist.min(axis=2), 0.0, None)
                    band = (u0, v0, 255.0 * np.exp(-(d * d) / (2.0 * sigma * sigma)))

    img = rng.integers(0, sim_cfg.background_max + 1, size=(h, w)).astype(np.float64)
    if band is not None:
        u0, v0, vals = band
        region = img[v0:v0 + vals.shape[0], u0:u0 + vals.shape[1]]
        np.maximum(region, vals, out=region)
    if pixel_noise_sigma > 0:
        img += rng.normal(0.0, pixel_noise_sigma, size=(h, w))
    return np.clip(np.rint(img), 0, 255).astype(np.uint8), n_visible


def render_stereo(
    truth: StylusPose,
    model: StylusModel,
    rig: StereoRig,
    *,
    frame_index: int = 0,
    seed: int = 0,
    occlusion_fraction: float = 0.0,
    pixel_noise_sigma: float = 0.0,
    sim_cfg: SimConfig = SimConfig(),
) -> StereoFrame:
    """Render the tape band into both cameras over background noise.

    Raises StylusOutOfView when unoccluded tape exists but none of it
    projects inside either image.
    """
    centerline = _visible_centerline(truth, model, occlusion_fraction)
    left, vis_l = _render_camera(
        centerline, model.radius, rig, False,
        np.random.default_rng([seed, frame_index, 0]), pixel_noise_sigma, sim_cfg,
    )
    right, vis_r = _render_camera(
        centerline, model.radius, rig, True,
        np.random.default_rng([seed, frame_index, 1]), pixel_noise_sigma, sim_cfg,
    )
    if len(centerline) and vis_l == 0 and vis_r == 0:
        raise StylusOutOfView("visible tape projects outside both cameras", frame_index)
    return StereoFrame(left=left, right=right, truth=truth, frame_index=frame_index)


def tablet_sample(
    truth: StylusPose,
    tablet_plane: Plane = TABLET_PLANE,
    hover_range: float = 0.01,
    noise_sigma: float = 0.0002,
    rng: np.random.Generator | None = None,
) -> TabletReading:
    """Tablet hover sensor: authoritative pose whenever the nib is within range.

    The boundary is inclusive: a nib at exactly ``hover_range`` still hovers.
    """
    height = tablet_plane.signed_distance(truth.tip)
    if height > hover_range:
        return TabletReading(hover=False, pose=None, noise_sigma=noise_sigma)
    if rng is None:
        rng = np.random.default_rng(0)
    tip = truth.tip.as_array() + rng.normal(0.0, noise_sigma, size=3)
    return TabletReading(
        hover=True,
        pose=StylusPose(Vec3.from_array(tip), truth.axis),
        noise_sigma=noise_sigma,
    )


def run_scenario(
    scenario: SimScenario,
    frames: int,
    *,
    rig: StereoRig | None = None,
    model: StylusModel | None = None,
    sim_cfg: SimConfig = SimConfig(),
    tablet_plane: Plane = TABLET_PLANE,
) -> Iterator[tuple[StereoFrame, TabletReading]]:
    """Yield (StereoFrame, TabletReading) pairs at the nominal 70 Hz step."""
    if frames < 1:
        raise ValueError("frames must be >= 1")
    rig = rig or default_rig()
    model = model or StylusModel.default()
    for i in range(frames):
        truth = scenario.trajectory(i)
        frame = render_stereo(
            truth, model, rig,
            frame_index=i,
            seed=scenario.seed,
            occlusion_fraction=scenario.occlusion_fraction(i),
            pixel_noise_sigma=scenario.pixel_noise_sigma,
            sim_cfg=sim_cfg,
        )
        reading = tablet_sample(
            truth, tablet_plane,
            hover_range=sim_cfg.hover_range_m,
            noise_sigma=sim_cfg.tablet_noise_sigma_m,
            rng=np.random.default_rng([scenario.seed, i, 2]),
        )
        yield frame, reading


def _dt(sim_cfg: SimConfig = SimConfig()) -> float:
    return 1.0 / sim_cfg.frame_rate_hz


def _write_pose(i: int) -> StylusPose:
    t = i * _dt()
    tip = Vec3(
        0.020 * math.sin(2 * math.pi * 0.9 * t) + 0.012 * math.sin(2 * math.pi * 0.21 * t + 1.3),
        0.050 + 0.016 * math.sin(2 * math.pi * 1.35 * t + 0.6),
        0.0005,
    )
    axis = Vec3(
        0.52 + 0.06 * math.sin(2 * math.pi * 0.10 * t),
        -0.28 + 0.05 * math.cos(2 * math.pi * 0.13 * t),
        0.80,
    ).normalized()
    return StylusPose(tip, axis)


def _lift_pose(i: int) -> StylusPose:
    t = i * _dt()
    tip = Vec3(
        0.010 * math.sin(2 * math.pi * 0.05 * t),
        0.050 + 0.008 * math.sin(2 * math.pi * 0.07 * t),
        min(0.05, i * 0.0002),
    )
    axis = Vec3(0.52, -0.28 + 0.03 * math.sin(2 * math.pi * 0.1 * t), 0.80).normalized()
    return StylusPose(tip, axis)


def _shake_pose(i: int) -> StylusPose:
    t = i * _dt()
    theta = 2 * math.pi * 0.8 * t
    tip = Vec3(
        0.020 * math.sin(2 * math.pi * 0.4 * t),
        0.050 + 0.020 * math.cos(2 * math.pi * 0.35 * t),
        0.035 + 0.010 * math.sin(2 * math.pi * 0.5 * t),
    )
    axis = Vec3(
        0.75 * math.cos(theta),
        0.75 * math.sin(theta),
        0.55 + 0.25 * math.sin(2 * math.pi * 0.11 * t),
    ).normalized()
    return StylusPose(tip, axis)


def _shake_occlusion(i: int) -> float:
    return min(1.0, max(0.0, 0.55 + 0.45 * math.sin(2 * math.pi * i / 90.0)))


_SCENARIOS: dict[str, tuple[Callable[[int], StylusPose], Callable[[int], float]]] = {
    "write": (_write_pose, lambda i: 0.0),
    "lift": (_lift_pose, lambda i: 0.0),
    "shake": (_shake_pose, _shake_occlusion),
}


def scenario_names() -> list[str]:
    return sorted(_SCENARIOS)


def make_scenario(name: str, *, seed: int = 0, pixel_noise_sigma: float = 1.0) -> SimScenario:
    if name not in _SCENARIOS:
        raise UnknownScenario(f"unknown scenario {name!r}; known: {scenario_names()}")
    trajectory, occlusion = _SCENARIOS[name]
    return SimScenario(
        name=name,
        trajectory=trajectory,
        occlusion_fraction=occlusion,
        pixel_noise_sigma=pixel_noise_sigma,
        seed=seed,
    )


def write_pgm(image: np.ndarray, path: str | Path) -> None:
    """Binary portable graymap (P5, maxval 255); bit-exact across platforms."""
    img = np.asarray(image, dtype=np.uint8)
    if img.ndim != 2:
        raise ValueError("image must be 2D grayscale")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM (P5) file")
    parts = data.split(maxsplit=4)
    if len(parts) < 5:
        raise ValueError("truncated PGM header")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only maxval 255 supported")
    pixels = parts[4][: w * h]
    if len(pixels) != w * h:
        raise ValueError("truncated PGM payload")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)


def export_frames(
    scenario: SimScenario,
    frames: int,
    out_dir: str | Path,
    *,
    rig: StereoRig | None = None,
    model: StylusModel | None = None,
) -> list[Path]:
    """Dump each camera of each frame as frame_NNNN_{left,right}.pgm."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for frame, _ in run_scenario(scenario, frames, rig=rig, model=model):
        for side in ("left", "right"):
            path = out / f"frame_{frame.frame_index:04d}_{side}.pgm"
            write_pgm(getattr(frame, side), path)
            written.append(path)
    return written
