"""The stereo vision pose pipeline: bright-pixel segmentation, ICP
correspondence between the two views, disparity unprojection, PCA axis
fitting, and Kalman smoothing.

ICP estimates a single rigid horizontal shift between the two pixel
sets (the rig is rectified and the target rigid) and establishes the
correspondence; per-pair disparities are then refined from epipolar-row
run centroids so the reconstructed cloud keeps its true depth extent at
sub-pixel resolution.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import TrackerConfig
from .geometry import StereoRig, StylusPose, Vec3
from .kalman import KalmanState, initial_state, kalman_step, predict
from .simulator import StereoFrame, StylusModel


class TrackingError(RuntimeError):
    """Base for per-frame pipeline failures; track_frame turns these into lost frames."""


class NoBrightPixels(TrackingError):
    pass


class NoCorrespondence(TrackingError):
    pass


class AllPointsDegenerate(TrackingError):
    pass


class TooFewPoints(TrackingError):
    pass


class DegenerateSpread(TrackingError):
    pass


@dataclass
class PixelSet:
    """Pixels above the segmentation threshold, in row-major scan order."""

    u: np.ndarray
    v: np.ndarray
    intensity: np.ndarray

    def __len__(self) -> int:
        return len(self.u)

    def to_list(self) -> list[tuple[float, float, float]]:
        return list(zip(self.u.tolist(), self.v.tolist(), self.intensity.tolist()))

    @classmethod
    def from_coords(cls, coords, intensity: float = 255.0) -> "PixelSet":
        arr = np.atleast_2d(np.asarray(coords, dtype=float))
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        return cls(arr[:, 0].copy(), arr[:, 1].copy(), np.full(len(arr), intensity))


@dataclass
class Correspondences:
    left: np.ndarray         # (m, 2) matched left pixels (u, v)
    right: np.ndarray        # (m, 2) matched right pixels
    disparities: np.ndarray  # (m,) per-pair u_left - u_right
    mean_disparity: float
    iterations: int
    converged: bool


@dataclass
class AxisFit:
    centroid: Vec3
    axis: Vec3
    elongation: float


@dataclass
class TrackDiagnostics:
    pixel_count: int = 0
    pixel_count_left: int = 0
    pixel_count_right: int = 0
    icp_iterations: int = 0
    icp_converged: bool = True
    mean_disparity: float = 0.0
    points: int = 0
    skipped_pairs: int = 0
    elongation: float = 0.0
    coasting: bool = False
    failure: str | None = None
    stage_times_us: dict[str, float] = field(default_factory=dict)


@dataclass
class TrackResult:
    pose: StylusPose | None
    lost: bool
    confidence: float
    diagnostics: TrackDiagnostics


def segment_bright(image: np.ndarray, threshold: int = 250) -> PixelSet:
    """All pixels with intensity strictly greater than the threshold."""
    img = np.asarray(image)
    vs, us = np.nonzero(img > threshold)
    return PixelSet(u=us.astype(np.int64), v=vs.astype(np.int64), intensity=img[vs, us])


def icp_match(
    left: PixelSet,
    right: PixelSet,
    max_iters: int = 20,
    tol: float = 0.05,
    epipolar_band: float = 2.0,
) -> Correspondences:
    """Iterative closest points restricted to a single horizontal shift.

    Alternates (a) matching every left pixel to the nearest right pixel
    within the epipolar band, after shifting by the current estimate, and
    (b) re-estimating the shift as the mean matched u-difference. Starts
    from the centroid u-difference.
    """
    if len(left) == 0 or len(right) == 0:
        raise ValueError("both pixel sets must be non-empty")
    lu = np.asarray(left.u, dtype=float)
    lv = np.asarray(left.v, dtype=float)
    ru = np.asarray(right.u, dtype=float)
    rv = np.asarray(right.v, dtype=float)

    dv = lv[:, None] - rv[None, :]
    in_band = np.abs(dv) <= epipolar_band
    if not in_band.any():
        raise NoCorrespondence("no left/right pixel pair within the epipolar band")
    dv2 = dv * dv

    shift = float(lu.mean() - ru.mean())
    matched = None
    iterations = 0
    converged = False
    for iterations in range(1, max_iters + 1):
        du = lu[:, None] - shift - ru[None, :]
        d2 = du * du + dv2
        d2[~in_band] = np.inf
        j = np.argmin(d2, axis=1)
        valid = np.isfinite(d2[np.arange(len(lu)), j])
        if not valid.any():
            raise NoCorrespondence("no left/right pixel pair within the epipolar band")
        matched = (valid, j)
        new_shift = float((lu[valid] - ru[j[valid]]).mean())
        delta = abs(new_shift - shift)
        shift = new_shift
        if delta < tol:
            converged = True
            break

    valid, j = matched
    disparities = lu[valid] - ru[j[valid]]
    return Correspondences(
        left=np.column_stack([lu[valid], lv[valid]]),
        right=np.column_stack([ru[j[valid]], rv[j[valid]]]),
        disparities=disparities,
        mean_disparity=float(disparities.mean()),
        iterations=iterations,
        converged=converged,
    )


def refine_row_disparities(
    left: PixelSet,
    right: PixelSet,
    corr: Correspondences,
) -> Correspondences:
    """Replace each pair's disparity with its epipolar row's run-centroid
    difference.

    Raw nearest-neighbor u-differences quantize toward the global shift,
    which flattens the reconstructed cloud in depth; aligning whole row
    runs keeps the tape's true depth extent at sub-pixel resolution.
    """
    left_rows: dict[float, float] = {}
    for v in np.unique(left.v):
        left_rows[float(v)] = float(np.asarray(left.u, dtype=float)[left.v == v].mean())
    right_rows: dict[float, float] = {}
    for v in np.unique(right.v):
        right_rows[float(v)] = float(np.asarray(right.u, dtype=float)[right.v == v].mean())

    disparities = corr.disparities.copy()
    for i in range(len(disparities)):
        v = float(corr.left[i, 1])
        if v in left_rows and v in right_rows:
            disparities[i] = left_rows[v] - right_rows[v]
    return Correspondences(
        left=corr.left,
        right=corr.right,
        disparities=disparities,
        mean_disparity=float(disparities.mean()),
        iterations=corr.iterations,
        converged=corr.converged,
    )


def reconstruct(
    corr: Correspondences,
    rig: StereoRig,
    min_disparity: float = 0.5,
) -> tuple[np.ndarray, int]:
    """Unproject each matched pair with its own disparity.

    Returns (camera-frame points (k, 3), number of skipped degenerate pairs).
    """
    d = corr.disparities
    good = d > min_disparity
    skipped = int(np.count_nonzero(~good))
    if not good.any():
        raise AllPointsDegenerate(f"all {len(d)} pairs at or below the {min_disparity} px floor")
    k = rig.intrinsics
    z = k.fx * rig.baseline / d[good]
    u = corr.left[good, 0]
    v = corr.left[good, 1]
    pts = np.column_stack([(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z])
    return pts, skipped


def fit_axis_pca(
    points: np.ndarray,
    min_points: int = 10,
    min_elongation: float = 4.0,
) -> AxisFit:
    """Principal axis of a point cloud expected to be a thin cylinder."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) < min_points:
        raise TooFewPoints(f"{len(pts)} points < required {min_points}")
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    cov = centered.T @ centered / len(pts)
    eigvals, eigvecs = np.linalg.eigh(cov)
    lam1, lam2 = float(eigvals[2]), float(eigvals[1])
    elongation = float("inf") if lam2 <= 1e-18 else lam1 / lam2
    if elongation < min_elongation:
        raise DegenerateSpread(
            f"elongation {elongation:.2f} < {min_elongation}: cloud is not a thin cylinder"
        )
    axis = eigvecs[:, 2]
    axis = axis / np.linalg.norm(axis)
    return AxisFit(
        centroid=Vec3.from_array(centroid),
        axis=Vec3.from_array(axis),
        elongation=elongation,
    )


def resolve_axis_and_tip(
    fit: AxisFit,
    model: StylusModel,
    prev_axis: Vec3 | None = None,
    up_hint: Vec3 = Vec3(0.0, 0.0, 1.0),
) -> StylusPose:
    """Pick the axis sign (temporal continuity, else away from the tablet)
    and place the tip at the tape centroid minus the tip offset."""
    axis = fit.axis
    reference = prev_axis if prev_axis is not None else up_hint
    if axis.dot(reference) < 0:
        axis = axis.scaled(-1.0)
    tip = fit.centroid - axis.scaled(model.tip_offset)
    return StylusPose(tip, axis.normalized())


def track_frame(
    frame: StereoFrame,
    state: KalmanState | None,
    rig: StereoRig,
    model: StylusModel,
    cfg: TrackerConfig = TrackerConfig(),
    *,
    up_hint: Vec3 = Vec3(0.0, 0.0, 1.0),
    dt: float = 1.0 / 70.0,
) -> tuple[TrackResult, KalmanState | None]:
    """Run the full pipeline on one stereo frame.

    Never raises: failures coast on the motion model for up to
    ``cfg.coast_frames`` frames (confidence decaying linearly to zero),
    after which the frame is flagged lost and the state dropped so the
    next good frame re-acquires from scratch.
    """
    diag = TrackDiagnostics()
    timers = diag.stage_times_us

    def tick(name: str, t0: int) -> int:
        t1 = time.perf_counter_ns()
        timers[name] = (t1 - t0) / 1000.0
        return t1

    try:
        t0 = time.perf_counter_ns()
        left = segment_bright(frame.left, cfg.segment_threshold)
        right = segment_bright(frame.right, cfg.segment_threshold)
        diag.pixel_count_left = len(left)
        diag.pixel_count_right = len(right)
        diag.pixel_count = min(len(left), len(right))
        t0 = tick("segment", t0)
        if len(left) == 0 or len(right) == 0:
            raise NoBrightPixels("a camera saw no pixels above the threshold")

        corr = icp_match(
            left, right,
            max_iters=cfg.icp_max_iters,
            tol=cfg.icp_tol_px,
            epipolar_band=cfg.epipolar_band_px,
        )
        diag.icp_iterations = corr.iterations
        diag.icp_converged = corr.converged
        diag.mean_disparity = corr.mean_disparity
        corr = refine_row_disparities(left, right, corr)
        t0 = tick("icp", t0)

        pts_cam, diag.skipped_pairs = reconstruct(corr, rig, cfg.min_disparity_px)
        pts_world = rig.left_to_world(pts_cam)
        diag.points = len(pts_world)
        t0 = tick("reconstruct", t0)

        fit = fit_axis_pca(pts_world, cfg.min_points, cfg.min_elongation)
        diag.elongation = fit.elongation
        prev_axis = state.axis if state is not None else None
        measured = resolve_axis_and_tip(fit, model, prev_axis, up_hint)
        t0 = tick("pca", t0)

        if state is None:
            new_state = initial_state(measured, frame.frame_index, cfg)
        else:
            new_state = kalman_step(state, measured, dt, cfg, frame.frame_index)
        tick("kalman", t0)
        return TrackResult(new_state.pose(), lost=False, confidence=1.0, diagnostics=diag), new_state

    except TrackingError as exc:
        diag.failure = f"{type(exc).__name__}: {exc}"
        if state is None:
            return TrackResult(None, lost=True, confidence=0.0, diagnostics=diag), None
        misses = max(1, frame.frame_index - state.last_update)
        confidence = max(0.0, 1.0 - misses / cfg.coast_frames)
        if confidence <= 0.0:
            return TrackResult(None, lost=True, confidence=0.0, diagnostics=diag), None
        diag.coasting = True
        coasted = predict(state, dt, cfg)
        return TrackResult(coasted.pose(), lost=False, confidence=confidence, diagnostics=diag), coasted


class VisionTracker:
    """Stateful wrapper: one owner, frames strictly ordered by index."""

    def __init__(
        self,
        rig: StereoRig,
        model: StylusModel,
        cfg: TrackerConfig = TrackerConfig(),
        up_hint: Vec3 = Vec3(0.0, 0.0, 1.0),
        dt: float = 1.0 / 70.0,
    ) -> None:
        self.rig = rig
        self.model = model
        self.cfg = cfg
        self.up_hint = up_hint
        self.dt = dt
        self.state: KalmanState | None = None

    def track(self, frame: StereoFrame) -> TrackResult:
        result, self.state = track_frame(
            frame, self.state, self.rig, self.model, self.cfg,
            up_hint=self.up_hint, dt=self.dt,
        )
        return result
