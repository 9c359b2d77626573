"""Versioned session documents: a canonical, human-readable JSON form
with fixed field ordering and fixed 3-decimal precision for millimeter
and second values, so serialization is byte-deterministic.
"""
from __future__ import annotations

import json
from typing import Any

from .notes import NoteEngine, NotePoint, Page, Picture, Stroke

DOC_VERSION = 1


class DocumentError(Exception):
    pass


class UnknownVersion(DocumentError):
    pass


class MalformedDocument(DocumentError):
    def __init__(self, message: str, location: str = "$") -> None:
        super().__init__(f"{location}: {message}")
        self.location = location


# -- building ---------------------------------------------------------------


def _point_dict(p: NotePoint) -> dict:
    d: dict[str, Any] = {
        "x_mm": p.x_mm,
        "y_mm": p.y_mm,
        "t_lecture_s": p.t_lecture_s,
        "t_wall_ms": p.t_wall_ms,
    }
    if p.pressure is not None:
        d["pressure"] = p.pressure
    return d


def _stroke_dict(s: Stroke) -> dict:
    return {
        "id": s.id,
        "tool": s.tool,
        "width_mm": s.width_mm,
        "points": [_point_dict(p) for p in s.points],
    }


def _picture_dict(p: Picture) -> dict:
    return {
        "id": p.id,
        "crop": {
            "u_min": p.crop.u_min,
            "v_min": p.crop.v_min,
            "u_max": p.crop.u_max,
            "v_max": p.crop.v_max,
            "frame_t_s": p.frame_t_s,
        },
        "bbox_mm": list(p.bbox_mm),
        "t_lecture_s": p.t_lecture_s,
    }


def _page_dict(page: Page) -> dict:
    return {
        "strokes": [_stroke_dict(s) for s in page.strokes],
        "pictures": [_picture_dict(p) for p in page.pictures],
    }


def build_document(engine: NoteEngine, events: list[dict]) -> dict:
    """Canonical document dict; ``events`` are already-canonical event dicts."""
    return {
        "version": DOC_VERSION,
        "lecture": {"duration_s": engine.clock.duration_s},
        "clock": {
            "playing": engine.clock.playing,
            "position_s": engine.clock.anchor_position_s,
            "anchor_wall_ms": engine.clock.anchor_wall_ms,
        },
        "tool": engine.tool,
        "pages": [_page_dict(p) for p in engine.notebook.pages],
        "events": events,
    }


# -- canonical text emission --------------------------------------------------


def _fmt_float(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _is_scalar(v: Any) -> bool:
    return v is None or isinstance(v, (bool, int, float, str))


def _emit_scalar(v: Any) -> str:
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return json.dumps(v)
    return _fmt_float(v)


def _inline(v: Any) -> bool:
    if _is_scalar(v):
        return True
    items = v.values() if isinstance(v, dict) else v
    return all(_is_scalar(i) for i in items)


def _emit(v: Any, depth: int) -> str:
    if _is_scalar(v):
        return _emit_scalar(v)
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if isinstance(v, dict):
        if not v:
            return "{}"
        if _inline(v):
            return "{" + ", ".join(f"{json.dumps(k)}: {_emit_scalar(x)}" for k, x in v.items()) + "}"
        body = ",\n".join(f"{inner}{json.dumps(k)}: {_emit(x, depth + 1)}" for k, x in v.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        if _inline(v):
            return "[" + ", ".join(_emit_scalar(x) for x in v) + "]"
        body = ",\n".join(f"{inner}{_emit(x, depth + 1)}" for x in v)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps_document(doc: dict) -> str:
    return _emit(doc, 0) + "\n"


# -- parsing / validation ------------------------------------------------------


def _expect(cond: bool, message: str, location: str) -> None:
    if not cond:
        raise MalformedDocument(message, location)


def _check_keys(obj: dict, required: tuple[str, ...], optional: tuple[str, ...], location: str) -> None:
    _expect(isinstance(obj, dict), "expected an object", location)
    missing = [k for k in required if k not in obj]
    _expect(not missing, f"missing fields {missing}", location)
    unknown = [k for k in obj if k not in required + optional]
    _expect(not unknown, f"unknown fields {unknown}", location)


def _check_number(v: Any, location: str) -> float:
    _expect(isinstance(v, (int, float)) and not isinstance(v, bool), "expected a number", location)
    return float(v)


def _check_int(v: Any, location: str) -> int:
    _expect(isinstance(v, int) and not isinstance(v, bool), "expected an integer", location)
    return v


def _validate_point(p: Any, location: str) -> None:
    _check_keys(p, ("x_mm", "y_mm", "t_lecture_s", "t_wall_ms"), ("pressure",), location)
    for key in ("x_mm", "y_mm", "t_lecture_s"):
        _check_number(p[key], f"{location}.{key}")
    _check_int(p["t_wall_ms"], f"{location}.t_wall_ms")


def _validate_stroke(s: Any, location: str) -> None:
    _check_keys(s, ("id", "tool", "width_mm", "points"), (), location)
    _check_int(s["id"], f"{location}.id")
    _expect(isinstance(s["tool"], str), "expected a string", f"{location}.tool")
    _check_number(s["width_mm"], f"{location}.width_mm")
    _expect(isinstance(s["points"], list) and len(s["points"]) >= 1,
            "expected a non-empty list", f"{location}.points")
    for i, p in enumerate(s["points"]):
        _validate_point(p, f"{location}.points[{i}]")


def _validate_picture(p: Any, location: str) -> None:
    _check_keys(p, ("id", "crop", "bbox_mm", "t_lecture_s"), (), location)
    _check_int(p["id"], f"{location}.id")
    _check_keys(p["crop"], ("u_min", "v_min", "u_max", "v_max", "frame_t_s"), (), f"{location}.crop")
    for key in ("u_min", "v_min", "u_max", "v_max", "frame_t_s"):
        _check_number(p["crop"][key], f"{location}.crop.{key}")
    _expect(isinstance(p["bbox_mm"], list) and len(p["bbox_mm"]) == 4,
            "expected a 4-element list", f"{location}.bbox_mm")
    for i, v in enumerate(p["bbox_mm"]):
        _check_number(v, f"{location}.bbox_mm[{i}]")
    _check_number(p["t_lecture_s"], f"{location}.t_lecture_s")


def _validate_event(e: Any, location: str, prev_seq: int) -> int:
    _check_keys(e, ("seq", "t_wall_ms", "kind", "payload"), (), location)
    seq = _check_int(e["seq"], f"{location}.seq")
    _expect(seq > prev_seq, f"seq {seq} not increasing after {prev_seq}", f"{location}.seq")
    _check_int(e["t_wall_ms"], f"{location}.t_wall_ms")
    _expect(isinstance(e["kind"], str), "expected a string", f"{location}.kind")
    _expect(isinstance(e["payload"], dict), "expected an object", f"{location}.payload")
    return seq


def parse_document(text: str) -> dict:
    """json.loads plus full schema validation; raises MalformedDocument/UnknownVersion."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(str(exc), f"$ (line {exc.lineno}, col {exc.colno})") from exc
    _check_keys(doc, ("version", "lecture", "clock", "tool", "pages", "events"), (), "$")
    if doc["version"] != DOC_VERSION:
        raise UnknownVersion(f"document version {doc['version']!r}, supported: {DOC_VERSION}")
    _check_keys(doc["lecture"], ("duration_s",), (), "$.lecture")
    _check_number(doc["lecture"]["duration_s"], "$.lecture.duration_s")
    _check_keys(doc["clock"], ("playing", "position_s", "anchor_wall_ms"), (), "$.clock")
    _expect(isinstance(doc["clock"]["playing"], bool), "expected a boolean", "$.clock.playing")
    _check_number(doc["clock"]["position_s"], "$.clock.position_s")
    _check_int(doc["clock"]["anchor_wall_ms"], "$.clock.anchor_wall_ms")
    _expect(isinstance(doc["tool"], str), "expected a string", "$.tool")
    _expect(isinstance(doc["pages"], list) and len(doc["pages"]) >= 1,
            "expected a non-empty list", "$.pages")
    for i, page in enumerate(doc["pages"]):
        loc = f"$.pages[{i}]"
        _check_keys(page, ("strokes", "pictures"), (), loc)
        _expect(isinstance(page["strokes"], list), "expected a list", f"{loc}.strokes")
        _expect(isinstance(page["pictures"], list), "expected a list", f"{loc}.pictures")
        for j, s in enumerate(page["strokes"]):
            _validate_stroke(s, f"{loc}.strokes[{j}]")
        for j, p in enumerate(page["pictures"]):
            _validate_picture(p, f"{loc}.pictures[{j}]")
    _expect(isinstance(doc["events"], list), "expected a list", "$.events")
    prev = 0
    for i, e in enumerate(doc["events"]):
        prev = _validate_event(e, f"$.events[{i}]", prev)
    return doc


def first_divergence(a: Any, b: Any, path: str = "$") -> str | None:
    """Path of the first structural difference between two documents, or None."""
    if type(a) is not type(b) and not (
        isinstance(a, (int, float)) and isinstance(b, (int, float))
        and not isinstance(a, bool) and not isinstance(b, bool)
    ):
        return path
    if isinstance(a, dict):
        for k in a:
            if k not in b:
                return f"{path}.{k}"
            diff = first_divergence(a[k], b[k], f"{path}.{k}")
            if diff:
                return diff
        extra = [k for k in b if k not in a]
        return f"{path}.{extra[0]}" if extra else None
    if isinstance(a, list):
        for i in range(min(len(a), len(b))):
            diff = first_divergence(a[i], b[i], f"{path}[{i}]")
            if diff:
                return diff
        return f"{path}[{min(len(a), len(b))}]" if len(a) != len(b) else None
    if isinstance(a, float) or isinstance(b, float):
        return None if float(a) == float(b) else path
    return None if a == b else path
