"""Maps already-detected hand gestures to geometric and clock effects:
a two-hand pinch pair becomes a capture rectangle on the slide via ray
casting from the head, and finger swipes become page flips.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geometry import (
    GeometryError,
    Plane,
    Vec3,
    ray_plane_intersect,
)

SWIPE_LEFT = "left"
SWIPE_RIGHT = "right"


class GestureError(ValueError):
    pass


class DegeneratePinch(GestureError):
    pass


class RayMiss(GestureError):
    pass


class OrphanUnpinch(GestureError):
    pass


@dataclass(frozen=True)
class HeadPose:
    """Cyclopean eye position plus orthonormal forward/up directions."""

    eye: Vec3
    forward: Vec3
    up: Vec3

    def __post_init__(self) -> None:
        f, u = self.forward.normalized(), self.up.normalized()
        if abs(f.dot(u)) > 1e-6:
            raise ValueError("forward and up must be orthogonal")
        object.__setattr__(self, "forward", f)
        object.__setattr__(self, "up", u)

    @property
    def right(self) -> Vec3:
        return self.up.cross(self.forward)


@dataclass(frozen=True)
class PinchPair:
    """The two pinched fingertip positions defining a capture rectangle."""

    left_pinch: Vec3
    right_pinch: Vec3
    head: HeadPose

    def __post_init__(self) -> None:
        for name, p in (("left_pinch", self.left_pinch), ("right_pinch", self.right_pinch)):
            if (p - self.head.eye).dot(self.head.forward) <= 0:
                raise ValueError(f"{name} must be in front of the head")
        if (self.left_pinch - self.right_pinch).norm() < 1e-12:
            raise DegeneratePinch("pinch points must not coincide")


@dataclass(frozen=True)
class SlideScreen:
    """The virtual lecture screen: a bounded plane with in-plane axes."""

    plane: Plane
    u_axis: Vec3
    v_axis: Vec3
    half_width: float
    half_height: float

    def __post_init__(self) -> None:
        if self.half_width <= 0 or self.half_height <= 0:
            raise ValueError("slide extents must be positive")
        object.__setattr__(self, "u_axis", self.u_axis.normalized())
        object.__setattr__(self, "v_axis", self.v_axis.normalized())

    def to_slide(self, world_point: Vec3) -> tuple[float, float]:
        rel = world_point - self.plane.point
        return (rel.dot(self.u_axis), rel.dot(self.v_axis))

    @classmethod
    def default(cls) -> "SlideScreen":
        return cls(
            plane=Plane(point=Vec3(0.0, 1.2, 0.5), normal=Vec3(0.0, -1.0, 0.0)),
            u_axis=Vec3(1.0, 0.0, 0.0),
            v_axis=Vec3(0.0, 0.0, 1.0),
            half_width=0.8,
            half_height=0.45,
        )


@dataclass(frozen=True)
class CaptureRect:
    """Axis-aligned rectangle in slide coordinates (meters on the screen)."""

    u_min: float
    v_min: float
    u_max: float
    v_max: float

    def __post_init__(self) -> None:
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise ValueError("capture rectangle must have positive extent")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.u_min, self.v_min, self.u_max, self.v_max)


@dataclass(frozen=True)
class SwipeEvent:
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in (SWIPE_LEFT, SWIPE_RIGHT):
            raise ValueError(f"unknown swipe direction {self.direction!r}")


def pinch_to_rect(pair: PinchPair, slide: SlideScreen, min_extent: float = 1e-9) -> CaptureRect:
    """Build the head-aligned 3D rectangle through the pinch points, ray-trace
    its corners from the eye onto the slide, and clip the hit bounding box.
    """
    head = pair.head
    basis = (head.right, head.up, head.forward)
    a = tuple((pair.left_pinch - head.eye).dot(b) for b in basis)
    c = tuple((pair.right_pinch - head.eye).dot(b) for b in basis)
    if abs(a[0] - c[0]) < min_extent or abs(a[1] - c[1]) < min_extent:
        raise DegeneratePinch("pinch points give a zero-width or zero-height rectangle")

    f_mix = 0.5 * (a[2] + c[2])
    corners = [
        (a[0], a[1], a[2]),
        (c[0], a[1], f_mix),
        (c[0], c[1], c[2]),
        (a[0], c[1], f_mix),
    ]
    hits_u: list[float] = []
    hits_v: list[float] = []
    for r, u, f in corners:
        direction = head.right.scaled(r) + head.up.scaled(u) + head.forward.scaled(f)
        try:
            hit = ray_plane_intersect(head.eye, direction, slide.plane)
        except GeometryError as exc:
            raise RayMiss(f"corner ray does not reach the slide: {exc}") from exc
        su, sv = slide.to_slide(hit)
        hits_u.append(su)
        hits_v.append(sv)

    u_min = max(min(hits_u), -slide.half_width)
    u_max = min(max(hits_u), slide.half_width)
    v_min = max(min(hits_v), -slide.half_height)
    v_max = min(max(hits_v), slide.half_height)
    if u_min >= u_max or v_min >= v_max:
        raise RayMiss("capture area lies entirely off the slide")
    return CaptureRect(u_min, v_min, u_max, v_max)


DIRECTIVE_PAUSE = "pause"
DIRECTIVE_CAPTURE = "capture"


class PinchSession:
    """Tracks one pinch-start .. unpinch interaction.

    Emits a pause directive at pinch-start; the matching resume is issued
    by the note engine once the captured picture has been embedded.
    """

    def __init__(self, slide: SlideScreen) -> None:
        self.slide = slide
        self._live_rect: CaptureRect | None = None
        self._active = False

    @property
    def active(self) -> bool:
        return self._active

    @property
    def live_rect(self) -> CaptureRect | None:
        return self._live_rect

    def start(self, pair: PinchPair) -> str:
        self._active = True
        self._live_rect = pinch_to_rect(pair, self.slide)
        return DIRECTIVE_PAUSE

    def move(self, pair: PinchPair) -> CaptureRect:
        if not self._active:
            raise OrphanUnpinch("pinch-move without an active pinch")
        self._live_rect = pinch_to_rect(pair, self.slide)
        return self._live_rect

    def unpinch(self) -> CaptureRect:
        if not self._active or self._live_rect is None:
            raise OrphanUnpinch("unpinch without an active pinch")
        rect = self._live_rect
        self._active = False
        self._live_rect = None
        return rect


def pinch_session(
    events: list[tuple[str, PinchPair | None]],
    slide: SlideScreen,
) -> tuple[CaptureRect, list[str]]:
    """Fold a well-ordered pinch event list into (final rect, directives)."""
    session = PinchSession(slide)
    directives: list[str] = []
    final: CaptureRect | None = None
    for kind, pair in events:
        if kind == "start":
            directives.append(session.start(pair))
        elif kind == "move":
            session.move(pair)
        elif kind == "unpinch":
            final = session.unpinch()
            directives.append(DIRECTIVE_CAPTURE)
        else:
            raise ValueError(f"unknown pinch event {kind!r}")
    if final is None:
        raise OrphanUnpinch("pinch sequence did not finish with an unpinch")
    return final, directives


def swipe_to_flip(event: SwipeEvent, left_delta: int = 1) -> int:
    """Leftward swipe advances to the next page by default; rightward goes back."""
    return left_delta if event.direction == SWIPE_LEFT else -left_delta
