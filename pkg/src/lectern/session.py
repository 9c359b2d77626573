"""Event-sourced session state: every user action arrives as an ordered
SessionEvent, is validated, canonicalized, applied to the note engine,
and appended to a replayable log. Session state is always the fold of
that log over an empty session.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from .config import AppConfig
from .document import build_document, dumps_document, first_divergence, parse_document
from .geometry import Vec3
from .gestures import (
    CaptureRect,
    GestureError,
    HeadPose,
    PinchPair,
    SlideScreen,
    SwipeEvent,
    pinch_to_rect,
    swipe_to_flip,
)
from .notes import TOOL_ORDER, NoteEngine, NoteError, Selection, q3

EVENT_KINDS = (
    "stroke-begin", "stroke-point", "stroke-end",
    "tool-cycle", "erase", "knife-select", "move", "marker-select",
    "review-seek", "slider-seek", "swipe",
    "pinch-start", "pinch-move", "unpinch", "glue-sketch",
    "clock-play", "clock-pause",
    # reserved for external reference lookups; accepted as a no-op
    "reference-lookup",
)


class SequenceGap(Exception):
    def __init__(self, expected: int, got: int) -> None:
        super().__init__(f"expected seq {expected}, got {got}")
        self.expected = expected
        self.got = got


class IntegrityMismatch(Exception):
    def __init__(self, location: str) -> None:
        super().__init__(f"replayed state diverges from the stored document at {location}")
        self.location = location


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    t_wall_ms: int
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "t_wall_ms": self.t_wall_ms, "kind": self.kind, "payload": self.payload}


@dataclass
class ApplyOutcome:
    seq: int
    status: str                  # "applied" | "rejected"
    reason: str | None = None
    result: dict | None = None


class PayloadError(ValueError):
    pass


# -- payload canonicalization ---------------------------------------------------


def _num(payload: dict, key: str) -> float:
    if key not in payload:
        raise PayloadError(f"missing field {key!r}")
    v = payload[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise PayloadError(f"field {key!r} must be a finite number")
    return q3(v)


def _opt_num(payload: dict, key: str) -> float | None:
    return None if payload.get(key) is None else _num(payload, key)


def _enum(payload: dict, key: str, values: tuple[str, ...]) -> str:
    v = payload.get(key)
    if v not in values:
        raise PayloadError(f"field {key!r} must be one of {values}")
    return v


def _vec3(v: Any, name: str) -> list[float]:
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise PayloadError(f"{name} must be a 3-element list")
    out = []
    for c in v:
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise PayloadError(f"{name} components must be finite numbers")
        out.append(q3(c))
    return out


def _check_no_extras(payload: dict, allowed: tuple[str, ...]) -> None:
    extras = [k for k in payload if k not in allowed]
    if extras:
        raise PayloadError(f"unknown payload fields {extras}")


def _canon_xy(payload: dict) -> dict:
    _check_no_extras(payload, ("x_mm", "y_mm", "pressure"))
    out = {"x_mm": _num(payload, "x_mm"), "y_mm": _num(payload, "y_mm")}
    pressure = _opt_num(payload, "pressure")
    if pressure is not None:
        out["pressure"] = pressure
    return out


def _canon_empty(payload: dict) -> dict:
    _check_no_extras(payload, ())
    return {}

def _canon_tool_cycle(payload: dict) -> dict:
    _check_no_extras(payload, ("direction", "tool"))
    if "tool" in payload:
        return {"tool": _enum(payload, "tool", TOOL_ORDER)}
    return {"direction": _enum(payload, "direction", ("forward", "back"))}


def _canon_erase(payload: dict) -> dict:
    _check_no_extras(payload, ("x_mm", "y_mm", "radius_mm"))
    return {
        "x_mm": _num(payload, "x_mm"),
        "y_mm": _num(payload, "y_mm"),
        "radius_mm": _num(payload, "radius_mm"),
    }


def _canon_rect(payload: dict) -> dict:
    _check_no_extras(payload, ("x0_mm", "y0_mm", "x1_mm", "y1_mm"))
    return {k: _num(payload, k) for k in ("x0_mm", "y0_mm", "x1_mm", "y1_mm")}


def _canon_move(payload: dict) -> dict:
    _check_no_extras(payload, ("dx_mm", "dy_mm"))
    return {"dx_mm": _num(payload, "dx_mm"), "dy_mm": _num(payload, "dy_mm")}


def _canon_review(payload: dict) -> dict:
    _check_no_extras(payload, ("stroke_ids",))
    if "stroke_ids" not in payload:
        return {}
    ids = payload["stroke_ids"]
    if not isinstance(ids, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in ids):
        raise PayloadError("stroke_ids must be a list of integers")
    return {"stroke_ids": sorted(set(ids))}


def _canon_slider(payload: dict) -> dict:
    _check_no_extras(payload, ("t_s",))
    return {"t_s": _num(payload, "t_s")}


def _canon_swipe(payload: dict) -> dict:
    _check_no_extras(payload, ("direction",))
    return {"direction": _enum(payload, "direction", ("left", "right"))}


def _canon_pinch(payload: dict) -> dict:
    _check_no_extras(payload, ("left", "right", "head"))
    head = payload.get("head")
    if not isinstance(head, dict):
        raise PayloadError("head must be an object with eye/forward/up")
    _check_no_extras(head, ("eye", "forward", "up"))
    return {
        "left": _vec3(payload.get("left"), "left"),
        "right": _vec3(payload.get("right"), "right"),
        "head": {
            "eye": _vec3(head.get("eye"), "head.eye"),
            "forward": _vec3(head.get("forward"), "head.forward"),
            "up": _vec3(head.get("up"), "head.up"),
        },
    }


def _canon_sketch(payload: dict) -> dict:
    _check_no_extras(payload, ("points_mm",))
    pts = payload.get("points_mm")
    if not isinstance(pts, list) or not pts:
        raise PayloadError("points_mm must be a non-empty list of [x, y] pairs")
    out = []
    for i, p in enumerate(pts):
        if not isinstance(p, (list, tuple)) or len(p) != 2:
            raise PayloadError(f"points_mm[{i}] must be an [x, y] pair")
        for c in p:
            if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
                raise PayloadError(f"points_mm[{i}] components must be finite numbers")
        out.append([q3(p[0]), q3(p[1])])
    return {"points_mm": out}


def _canon_lookup(payload: dict) -> dict:
    _check_no_extras(payload, ("query",))
    if "query" in payload and not isinstance(payload["query"], str):
        raise PayloadError("query must be a string")
    return {"query": payload["query"]} if "query" in payload else {}


_CANONICALIZERS: dict[str, Callable[[dict], dict]] = {
    "stroke-begin": _canon_xy,
    "stroke-point": _canon_xy,
    "stroke-end": _canon_empty,
    "tool-cycle": _canon_tool_cycle,
    "erase": _canon_erase,
    "knife-select": _canon_rect,
    "marker-select": _canon_rect,
    "move": _canon_move,
    "review-seek": _canon_review,
    "slider-seek": _canon_slider,
    "swipe": _canon_swipe,
    "pinch-start": _canon_pinch,
    "pinch-move": _canon_pinch,
    "unpinch": _canon_empty,
    "glue-sketch": _canon_sketch,
    "clock-play": _canon_empty,
    "clock-pause": _canon_empty,
    "reference-lookup": _canon_lookup,
}


def _sanitize(value: Any) -> Any:
    """JSON-safe copy of an arbitrary payload, for logging rejected events."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    return str(value)


@dataclass
class _PinchState:
    live_rect_tuple: tuple[float, float, float, float]
    was_playing: bool


class Session:
    """One notebook + clock + tool + event log; all mutation passes through apply()."""

    def __init__(
        self,
        duration_s: float,
        cfg: AppConfig = AppConfig(),
        slide: SlideScreen | None = None,
    ) -> None:
        self.cfg = cfg
        self.slide = slide or SlideScreen.default()
        self.engine = NoteEngine(duration_s, cfg.notebook)
        self.events: list[SessionEvent] = []
        self.log: list[ApplyOutcome] = []
        self._pinch: _PinchState | None = None

    @property
    def last_seq(self) -> int:
        return self.events[-1].seq if self.events else 0

    @property
    def last_wall_ms(self) -> int:
        return self.events[-1].t_wall_ms if self.events else 0

    # -- ingestion -------------------------------------------------------------

    def apply(self, event: SessionEvent) -> ApplyOutcome:
        """Apply one event; raises SequenceGap on out-of-order seq, otherwise
        returns an applied/rejected outcome. Rejected events are logged but
        never mutate state."""
        expected = self.last_seq + 1
        if event.seq != expected:
            raise SequenceGap(expected, event.seq)

        outcome = self._apply_checked(event)
        self.log.append(outcome)
        return outcome

    def _apply_checked(self, event: SessionEvent) -> ApplyOutcome:
        def reject(reason: str, payload: dict | None = None) -> ApplyOutcome:
            stored = payload if payload is not None else _sanitize(event.payload)
            self.events.append(SessionEvent(event.seq, event.t_wall_ms, event.kind, stored))
            return ApplyOutcome(event.seq, "rejected", reason=reason)

        if event.kind not in EVENT_KINDS:
            return reject(f"unknown event kind {event.kind!r}")
        if event.t_wall_ms < self.last_wall_ms:
            return reject("t_wall_ms must be non-decreasing")
        if not isinstance(event.payload, dict):
            return reject("payload must be an object", payload={})

        try:
            payload = _CANONICALIZERS[event.kind](event.payload)
        except PayloadError as exc:
            return reject(f"malformed payload: {exc}")

        try:
            result = self._dispatch(event.kind, payload, event.t_wall_ms)
        except (NoteError, GestureError, ValueError) as exc:
            return reject(f"{type(exc).__name__}: {exc}", payload=payload)

        self.events.append(SessionEvent(event.seq, event.t_wall_ms, event.kind, payload))
        return ApplyOutcome(event.seq, "applied", result=result)

    # -- dispatch ---------------------------------------------------------------

    def _parse_pinch(self, payload: dict) -> PinchPair:
        head = payload["head"]
        return PinchPair(
            left_pinch=_vec_of(payload["left"]),
            right_pinch=_vec_of(payload["right"]),
            head=HeadPose(
                eye=_vec_of(head["eye"]),
                forward=_vec_of(head["forward"]),
                up=_vec_of(head["up"]),
            ),
        )

    def _dispatch(self, kind: str, payload: dict, t_wall_ms: int) -> dict:
        engine = self.engine
        clock = engine.clock

        if kind == "stroke-begin":
            engine.begin_stroke(payload["x_mm"], payload["y_mm"], t_wall_ms, payload.get("pressure"))
            return {"active": True}
        if kind == "stroke-point":
            engine.append_point(payload["x_mm"], payload["y_mm"], t_wall_ms, payload.get("pressure"))
            return {"active": True}
        if kind == "stroke-end":
            report = engine.end_stroke()
            return {
                "stroke_id": report.stroke.id,
                "t_start_s": report.stroke.t_start,
                "points": len(report.stroke.points),
                "clamped_points": report.clamped_points,
            }
        if kind == "tool-cycle":
            tool = (
                engine.select_tool(payload["tool"])
                if "tool" in payload
                else engine.cycle_tool(payload["direction"])
            )
            return {"tool": tool}
        if kind == "erase":
            report = engine.erase_at(payload["x_mm"], payload["y_mm"], payload["radius_mm"])
            return {
                "removed_points": report.removed_points,
                "deleted_stroke_ids": report.deleted_stroke_ids,
                "created_stroke_ids": report.created_stroke_ids,
            }
        if kind in ("knife-select", "marker-select"):
            select = engine.knife_select if kind == "knife-select" else engine.marker_select
            sel = select(payload["x0_mm"], payload["y0_mm"], payload["x1_mm"], payload["y1_mm"])
            return {
                "stroke_ids": sorted(sel.stroke_ids),
                "picture_ids": sorted(sel.picture_ids),
            }
        if kind == "move":
            dx, dy = engine.move_selection(payload["dx_mm"], payload["dy_mm"])
            return {"dx_mm": dx, "dy_mm": dy}
        if kind == "review-seek":
            selection = None
            if "stroke_ids" in payload:
                selection = Selection(stroke_ids=frozenset(payload["stroke_ids"]))
            t = engine.review_seek(t_wall_ms, selection)
            return {"t_lecture_s": t, "playing": True}
        if kind == "slider-seek":
            pos = engine.slider_seek(payload["t_s"], t_wall_ms)
            return {"position_s": pos, "playing": clock.playing}
        if kind == "swipe":
            delta = swipe_to_flip(SwipeEvent(payload["direction"]), self.cfg.notebook.swipe_left_delta)
            flip = engine.flip_page(delta)
            return {"page_index": flip.page_index, "moved": flip.moved, "appended": flip.appended}
        if kind == "pinch-start":
            pair = self._parse_pinch(payload)
            rect = pinch_to_rect(pair, self.slide)
            was_playing = clock.playing
            clock.pause(t_wall_ms)
            self._pinch = _PinchState(live_rect_tuple=rect.as_tuple(), was_playing=was_playing)
            return {"paused": True, "rect": list(rect.as_tuple())}
        if kind == "pinch-move":
            if self._pinch is None:
                raise GestureError("pinch-move without an active pinch")
            pair = self._parse_pinch(payload)
            rect = pinch_to_rect(pair, self.slide)
            self._pinch.live_rect_tuple = rect.as_tuple()
            return {"rect": list(rect.as_tuple())}
        if kind == "unpinch":
            if self._pinch is None:
                raise GestureError("unpinch without an active pinch")
            pinch = self._pinch
            rect = CaptureRect(*pinch.live_rect_tuple)
            frame_t = clock.position_at(t_wall_ms)
            engine.stage_capture(rect, frame_t, resume_playing=pinch.was_playing)
            self._pinch = None
            staged = engine.pending_capture
            return {
                "rect": [staged.rect.u_min, staged.rect.v_min, staged.rect.u_max, staged.rect.v_max],
                "frame_t_s": staged.frame_t_s,
            }
        if kind == "glue-sketch":
            points = [(p[0], p[1]) for p in payload["points_mm"]]
            picture, resume = engine.embed_picture(points)
            if resume:
                clock.play(t_wall_ms)
            return {
                "picture_id": picture.id,
                "bbox_mm": list(picture.bbox_mm),
                "resumed": resume,
                "playing": clock.playing,
            }
        if kind == "clock-play":
            clock.play(t_wall_ms)
            return {"playing": True, "position_s": q3(clock.position_at(t_wall_ms))}
        if kind == "clock-pause":
            clock.pause(t_wall_ms)
            return {"playing": False, "position_s": q3(clock.position_at(t_wall_ms))}
        if kind == "reference-lookup":
            return {"reserved": True}
        raise AssertionError(f"unhandled kind {kind}")  # pragma: no cover

    # -- views -----------------------------------------------------------------

    def clock_view(self, t_wall_ms: int | None = None) -> dict:
        clock = self.engine.clock
        at = t_wall_ms if t_wall_ms is not None else self.last_wall_ms
        return {
            "playing": clock.playing,
            "position_s": q3(clock.position_at(at)),
            "duration_s": clock.duration_s,
        }

    def page_render(self, page_index: int) -> dict:
        book = self.engine.notebook
        if not (0 <= page_index < len(book.pages)):
            raise ValueError(f"page {page_index} out of range (0..{len(book.pages) - 1})")
        page = book.pages[page_index]
        return {
            "page_index": page_index,
            "page_count": len(book.pages),
            "current_page": book.current_page,
            "tool": self.engine.tool,
            "selection": sorted(self.engine.selection.stroke_ids),
            "strokes": [
                {
                    "id": s.id,
                    "tool": s.tool,
                    "width_mm": s.width_mm,
                    "t_start_s": s.t_start,
                    "points": [[p.x_mm, p.y_mm] for p in s.points],
                }
                for s in page.strokes
            ],
            "pictures": [
                {
                    "id": p.id,
                    "bbox_mm": list(p.bbox_mm),
                    "t_lecture_s": p.t_lecture_s,
                    "crop": [p.crop.u_min, p.crop.v_min, p.crop.u_max, p.crop.v_max],
                }
                for p in page.pictures
            ],
        }

    def export_text(self) -> str:
        doc = build_document(self.engine, [e.to_dict() for e in self.events])
        return dumps_document(doc)


def _vec_of(values: list[float]) -> Vec3:
    return Vec3(values[0], values[1], values[2])


def replay_text(text: str, cfg: AppConfig = AppConfig(), slide: SlideScreen | None = None) -> Session:
    """Rebuild a session by folding the stored events from empty, then verify
    the result matches the stored notebook; raises IntegrityMismatch if not."""
    doc = parse_document(text)
    session = Session(doc["lecture"]["duration_s"], cfg, slide=slide)
    for raw in doc["events"]:
        session.apply(SessionEvent(raw["seq"], raw["t_wall_ms"], raw["kind"], raw["payload"]))
    rebuilt = build_document(session.engine, [e.to_dict() for e in session.events])
    divergence = first_divergence(rebuilt, doc)
    if divergence is not None:
        raise IntegrityMismatch(divergence)
    return session
