"""Camera models, rigid poses, and the projection math shared by the
simulator, the stylus tracker, and gesture ray casting.

Conventions: camera frames are +x right, +y down, +z forward (optical
axis). The stereo rig is rectified with identical intrinsics for both
cameras, so corresponding pixels differ only in u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-9


class GeometryError(ValueError):
    """Base class for recoverable geometric failures."""


class PointBehindCamera(GeometryError):
    pass


class DegenerateDisparity(GeometryError):
    pass


class RayParallelToPlane(GeometryError):
    pass


class IntersectionBehindOrigin(GeometryError):
    pass


@dataclass(frozen=True)
class Vec3:
    """3D point or direction; meters for positions, unitless for directions."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite components ({self.x!r}, {self.y!r}, {self.z!r})")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n < 1e-12:
            raise ValueError("cannot normalize a zero-length vector")
        return self.scaled(1.0 / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Vec3":
        return cls(float(a[0]), float(a[1]), float(a[2]))


def _require_unit(v: Vec3, name: str) -> None:
    if abs(v.norm() - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be unit length (|{name}| = {v.norm():.12f})")


def angle_between_deg(a: Vec3, b: Vec3) -> float:
    """Unsigned angle between two directions in degrees."""
    c = a.normalized().dot(b.normalized())
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Pose of a local frame in world coordinates: world = R @ local + t."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self) -> None:
        R = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if R.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-6) or np.linalg.det(R) < 0:
            raise ValueError("rotation must be a proper orthonormal matrix")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def look_at(cls, eye: Vec3, target: Vec3, up_hint: Vec3 = Vec3(0.0, 0.0, 1.0)) -> "RigidTransform":
        """Camera pose with +z toward ``target`` and image rows level w.r.t. ``up_hint``."""
        z = (target - eye).normalized()
        x_raw = z.cross(up_hint)
        if x_raw.norm() < 1e-9:
            raise ValueError("view direction parallel to up hint")
        x = x_raw.normalized()
        y = z.cross(x)  # +y down in image
        R = np.column_stack([x.as_array(), y.as_array(), z.as_array()])
        return cls(R, eye.as_array())

    def to_local(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return (pts - self.translation) @ self.rotation

    def to_world(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation

    def apply(self, p: Vec3) -> Vec3:
        return Vec3.from_array(self.to_world(p.as_array()))


@dataclass(frozen=True, eq=False)
class StereoRig:
    """Rectified stereo pair; right camera offset by ``baseline`` along camera +x."""

    intrinsics: CameraIntrinsics
    baseline: float
    rig_pose: RigidTransform

    def __post_init__(self) -> None:
        if self.baseline <= 0:
            raise ValueError("baseline must be positive")

    def world_to_left(self, points: np.ndarray) -> np.ndarray:
        return self.rig_pose.to_local(points)

    def world_to_right(self, points: np.ndarray) -> np.ndarray:
        cam = self.rig_pose.to_local(points)
        cam = np.atleast_2d(cam).copy()
        cam[:, 0] -= self.baseline
        return cam

    def left_to_world(self, points: np.ndarray) -> np.ndarray:
        return self.rig_pose.to_world(points)


@dataclass(frozen=True)
class StylusPose:
    """Tip position plus the unit direction from tip toward tail."""

    tip: Vec3
    axis: Vec3

    def __post_init__(self) -> None:
        _require_unit(self.axis, "axis")

    @classmethod
    def make(cls, tip: Vec3, axis: Vec3) -> "StylusPose":
        return cls(tip, axis.normalized())


@dataclass(frozen=True)
class Plane:
    point: Vec3
    normal: Vec3

    def __post_init__(self) -> None:
        _require_unit(self.normal, "normal")

    def signed_distance(self, p: Vec3) -> float:
        return (p - self.point).dot(self.normal)


def project(p: Vec3, k: CameraIntrinsics) -> tuple[float, float]:
    """Pinhole projection of a camera-frame point to pixel coordinates."""
    if p.z <= 0:
        raise PointBehindCamera(f"point z={p.z} is not in front of the camera")
    u = k.fx * p.x / p.z + k.cx
    v = k.fy * p.y / p.z + k.cy
    return (u, v)


def project_points(points: np.ndarray, k: CameraIntrinsics) -> np.ndarray:
    """Vectorized pinhole projection; every point must have z > 0."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(pts[:, 2] <= 0):
        raise PointBehindCamera("all points must have z > 0")
    uv = np.empty((len(pts), 2))
    uv[:, 0] = k.fx * pts[:, 0] / pts[:, 2] + k.cx
    uv[:, 1] = k.fy * pts[:, 1] / pts[:, 2] + k.cy
    return uv


def unproject_stereo(
    u_left: float,
    v: float,
    disparity: float,
    rig: StereoRig,
    min_disparity: float = 0.5,
) -> Vec3:
    """Recover a left-camera-frame point from a pixel and its horizontal disparity."""
    if disparity <= min_disparity:
        raise DegenerateDisparity(f"disparity {disparity} px is at or below {min_disparity} px")
    k = rig.intrinsics
    z = k.fx * rig.baseline / disparity
    x = (u_left - k.cx) * z / k.fx
    y = (v - k.cy) * z / k.fy
    return Vec3(x, y, z)


def ray_plane_intersect(origin: Vec3, direction: Vec3, plane: Plane) -> Vec3:
    """Intersect a forward ray with a plane."""
    if direction.norm() < 1e-12:
        raise ValueError("ray direction must be non-zero")
    denom = direction.dot(plane.normal)
    if abs(denom) < 1e-9:
        raise RayParallelToPlane("ray does not approach the plane")
    t = (plane.point - origin).dot(plane.normal) / denom
    if t < 0:
        raise IntersectionBehindOrigin(f"intersection at t={t} is behind the ray origin")
    return origin + direction.scaled(t)
