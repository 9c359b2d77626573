"""Timestamped digital ink: strokes stamped with the lecture clock,
eraser with stroke splitting, cut/move post-editing, marker selection
driving review seeks, picture embedding, and page flipping.

All persisted floats are quantized to three decimals (millimeters and
seconds) at the moment they enter the state, so that exporting and
replaying a session is byte-deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .config import NotebookConfig
from .gestures import CaptureRect

TOOL_ORDER = ("stylus", "eraser", "magic-stick", "marker", "glue", "knife")

STROKE_PEN = "pen"
STROKE_MARKER = "marker-highlight"


def q3(value: float) -> float:
    """Canonical 3-decimal quantization applied to every persisted float."""
    return round(float(value), 3)


class NoteError(Exception):
    """Base for note-engine rejections; the session records these and moves on."""


class ToolMismatch(NoteError):
    pass


class AppendWithoutBegin(NoteError):
    pass


class StrokeAlreadyActive(NoteError):
    pass


class TimestampRegression(NoteError):
    pass


class EmptySelection(NoteError):
    pass


class NoPendingCapture(NoteError):
    pass


class EmptySketch(NoteError):
    pass


@dataclass(frozen=True)
class NotePoint:
    x_mm: float
    y_mm: float
    t_lecture_s: float
    t_wall_ms: int
    pressure: float | None = None


@dataclass
class Stroke:
    id: int
    tool: str
    width_mm: float
    page_index: int
    points: list[NotePoint]

    @property
    def t_start(self) -> float:
        return self.points[0].t_lecture_s


@dataclass
class Picture:
    id: int
    crop: CaptureRect
    frame_t_s: float         # lecture time identifying the captured slide frame
    bbox_mm: tuple[float, float, float, float]
    t_lecture_s: float


@dataclass
class Page:
    strokes: list[Stroke] = field(default_factory=list)
    pictures: list[Picture] = field(default_factory=list)


@dataclass
class Notebook:
    pages: list[Page] = field(default_factory=lambda: [Page()])
    current_page: int = 0

    def page(self) -> Page:
        return self.pages[self.current_page]

    def find_stroke(self, stroke_id: int) -> tuple[int, Stroke] | None:
        for page_index, page in enumerate(self.pages):
            for stroke in page.strokes:
                if stroke.id == stroke_id:
                    return page_index, stroke
        return None

    def find_picture(self, picture_id: int) -> tuple[int, Picture] | None:
        for page_index, page in enumerate(self.pages):
            for picture in page.pictures:
                if picture.id == picture_id:
                    return page_index, picture
        return None


@dataclass
class LectureClock:
    """Play/pause state anchored to wall time; every stroke timestamp comes
    from evaluating this clock at an event's wall time."""

    duration_s: float
    playing: bool = False
    anchor_position_s: float = 0.0
    anchor_wall_ms: int = 0

    def position_at(self, t_wall_ms: int) -> float:
        pos = self.anchor_position_s
        if self.playing:
            pos += (t_wall_ms - self.anchor_wall_ms) / 1000.0
        return min(max(pos, 0.0), self.duration_s)

    def play(self, t_wall_ms: int) -> None:
        self.anchor_position_s = q3(self.position_at(t_wall_ms))
        self.anchor_wall_ms = t_wall_ms
        self.playing = True

    def pause(self, t_wall_ms: int) -> None:
        self.anchor_position_s = q3(self.position_at(t_wall_ms))
        self.anchor_wall_ms = t_wall_ms
        self.playing = False

    def seek(self, t_s: float, t_wall_ms: int) -> float:
        self.anchor_position_s = q3(min(max(t_s, 0.0), self.duration_s))
        self.anchor_wall_ms = t_wall_ms
        return self.anchor_position_s


@dataclass(frozen=True)
class Selection:
    stroke_ids: frozenset[int] = frozenset()
    picture_ids: frozenset[int] = frozenset()

    def __bool__(self) -> bool:
        return bool(self.stroke_ids or self.picture_ids)


@dataclass
class StrokeReport:
    stroke: Stroke
    clamped_points: int


@dataclass
class EraseReport:
    removed_points: int
    deleted_stroke_ids: list[int]
    created_stroke_ids: list[int]


@dataclass
class FlipResult:
    page_index: int
    moved: bool
    appended: bool


@dataclass
class _ActiveStroke:
    tool: str
    width_mm: float
    page_index: int
    points: list[NotePoint]
    clamped: int


@dataclass
class PendingCapture:
    rect: CaptureRect
    frame_t_s: float
    resume_playing: bool


class NoteEngine:
    """One notebook, one lecture clock, one active tool. All mutations are
    driven by session events; reads can snapshot freely."""

    def __init__(self, duration_s: float, cfg: NotebookConfig = NotebookConfig()) -> None:
        if duration_s <= 0:
            raise ValueError("lecture duration must be positive")
        self.cfg = cfg
        self.notebook = Notebook()
        self.clock = LectureClock(duration_s=q3(duration_s))
        self.tool = TOOL_ORDER[0]
        self.selection = Selection()
        self.pending_capture: PendingCapture | None = None
        self._active: _ActiveStroke | None = None
        self._next_stroke_id = 1
        self._next_picture_id = 1

    # -- tools ---------------------------------------------------------

    def cycle_tool(self, direction: str) -> str:
        if direction not in ("forward", "back"):
            raise NoteError(f"unknown cycle direction {direction!r}")
        step = 1 if direction == "forward" else -1
        index = TOOL_ORDER.index(self.tool)
        self.tool = TOOL_ORDER[(index + step) % len(TOOL_ORDER)]
        return self.tool

    def select_tool(self, tool: str) -> str:
        if tool not in TOOL_ORDER:
            raise NoteError(f"unknown tool {tool!r}")
        self.tool = tool
        return self.tool

    def _require_tool(self, *tools: str) -> None:
        if self.tool not in tools:
            raise ToolMismatch(f"requires tool in {tools}, active is {self.tool!r}")

    # -- stroke recording ----------------------------------------------

    def _clamp_point(self, x_mm: float, y_mm: float) -> tuple[float, float, bool]:
        cx = min(max(x_mm, 0.0), self.cfg.page_width_mm)
        cy = min(max(y_mm, 0.0), self.cfg.page_height_mm)
        return q3(cx), q3(cy), (cx != x_mm or cy != y_mm)

    def _stamp(self, x_mm: float, y_mm: float, t_wall_ms: int, pressure: float | None) -> tuple[NotePoint, bool]:
        x, y, clamped = self._clamp_point(x_mm, y_mm)
        point = NotePoint(
            x_mm=x,
            y_mm=y,
            t_lecture_s=q3(self.clock.position_at(t_wall_ms)),
            t_wall_ms=int(t_wall_ms),
            pressure=None if pressure is None else q3(min(max(pressure, 0.0), 1.0)),
        )
        return point, clamped

    def begin_stroke(self, x_mm: float, y_mm: float, t_wall_ms: int, pressure: float | None = None) -> None:
        self._require_tool("stylus", "marker")
        if self._active is not None:
            raise StrokeAlreadyActive("a stroke is already being recorded")
        if self.tool == "stylus":
            tool, width = STROKE_PEN, self.cfg.pen_width_mm
        else:
            tool, width = STROKE_MARKER, self.cfg.marker_width_mm
        point, clamped = self._stamp(x_mm, y_mm, t_wall_ms, pressure)
        self._active = _ActiveStroke(
            tool=tool,
            width_mm=q3(width),
            page_index=self.notebook.current_page,
            points=[point],
            clamped=int(clamped),
        )

    def append_point(self, x_mm: float, y_mm: float, t_wall_ms: int, pressure: float | None = None) -> None:
        if self._active is None:
            raise AppendWithoutBegin("stroke-point before stroke-begin")
        if t_wall_ms < self._active.points[-1].t_wall_ms:
            raise TimestampRegression("stroke points must have non-decreasing wall time")
        point, clamped = self._stamp(x_mm, y_mm, t_wall_ms, pressure)
        self._active.points.append(point)
        self._active.clamped += int(clamped)

    def end_stroke(self) -> StrokeReport:
        if self._active is None:
            raise AppendWithoutBegin("stroke-end before stroke-begin")
        active = self._active
        self._active = None
        stroke = Stroke(
            id=self._next_stroke_id,
            tool=active.tool,
            width_mm=active.width_mm,
            page_index=active.page_index,
            points=active.points,
        )
        self._next_stroke_id += 1
        self.notebook.pages[active.page_index].strokes.append(stroke)
        return StrokeReport(stroke=stroke, clamped_points=active.clamped)

    # -- eraser ----------------------------------------------------------

    def erase_at(self, x_mm: float, y_mm: float, radius_mm: float) -> EraseReport:
        self._require_tool("eraser")
        if radius_mm <= 0:
            raise NoteError("eraser radius must be positive")
        page = self.notebook.page()
        removed = 0
        deleted: list[int] = []
        created: list[int] = []
        rebuilt: list[Stroke] = []
        r2 = radius_mm * radius_mm
        for stroke in page.strokes:
            hit = [
                (p.x_mm - x_mm) ** 2 + (p.y_mm - y_mm) ** 2 <= r2
                for p in stroke.points
            ]
            if not any(hit):
                rebuilt.append(stroke)
                continue
            removed += sum(hit)
            deleted.append(stroke.id)
            run: list[NotePoint] = []
            runs: list[list[NotePoint]] = []
            for point, gone in zip(stroke.points, hit):
                if gone:
                    if run:
                        runs.append(run)
                        run = []
                else:
                    run.append(point)
            if run:
                runs.append(run)
            for run_points in runs:
                piece = Stroke(
                    id=self._next_stroke_id,
                    tool=stroke.tool,
                    width_mm=stroke.width_mm,
                    page_index=stroke.page_index,
                    points=run_points,
                )
                self._next_stroke_id += 1
                rebuilt.append(piece)
                created.append(piece.id)
        page.strokes = rebuilt
        return EraseReport(removed_points=removed, deleted_stroke_ids=deleted, created_stroke_ids=created)

    # -- selection, move, review -----------------------------------------

    def _select(self, x0: float, y0: float, x1: float, y1: float) -> Selection:
        lo_x, hi_x = min(x0, x1), max(x0, x1)
        lo_y, hi_y = min(y0, y1), max(y0, y1)
        page = self.notebook.page()
        strokes = frozenset(
            s.id for s in page.strokes
            if any(lo_x <= p.x_mm <= hi_x and lo_y <= p.y_mm <= hi_y for p in s.points)
        )
        pictures = frozenset(
            pic.id for pic in page.pictures
            if pic.bbox_mm[0] <= hi_x and pic.bbox_mm[2] >= lo_x
            and pic.bbox_mm[1] <= hi_y and pic.bbox_mm[3] >= lo_y
        )
        self.selection = Selection(stroke_ids=strokes, picture_ids=pictures)
        return self.selection

    def knife_select(self, x0: float, y0: float, x1: float, y1: float) -> Selection:
        self._require_tool("knife")
        return self._select(x0, y0, x1, y1)

    def marker_select(self, x0: float, y0: float, x1: float, y1: float) -> Selection:
        self._require_tool("marker")
        return self._select(x0, y0, x1, y1)

    def _resolve(self, selection: Selection | None) -> tuple[list[Stroke], list[Picture]]:
        sel = selection if selection is not None else self.selection
        strokes = []
        pictures = []
        for sid in sorted(sel.stroke_ids):
            found = self.notebook.find_stroke(sid)
            if found is not None:
                strokes.append(found[1])
        for pid in sorted(sel.picture_ids):
            found = self.notebook.find_picture(pid)
            if found is not None:
                pictures.append(found[1])
        return strokes, pictures

    def move_selection(self, dx_mm: float, dy_mm: float, selection: Selection | None = None) -> tuple[float, float]:
        strokes, pictures = self._resolve(selection)
        if not strokes and not pictures:
            raise EmptySelection("nothing to move")

        xs: list[float] = []
        ys: list[float] = []
        for stroke in strokes:
            xs.extend(p.x_mm for p in stroke.points)
            ys.extend(p.y_mm for p in stroke.points)
        for pic in pictures:
            xs.extend((pic.bbox_mm[0], pic.bbox_mm[2]))
            ys.extend((pic.bbox_mm[1], pic.bbox_mm[3]))

        # clamp the delta so the whole selection stays on the page
        dx = min(max(dx_mm, -min(xs)), self.cfg.page_width_mm - max(xs))
        dy = min(max(dy_mm, -min(ys)), self.cfg.page_height_mm - max(ys))
        dx, dy = q3(dx), q3(dy)

        for stroke in strokes:
            stroke.points = [
                replace(p, x_mm=q3(p.x_mm + dx), y_mm=q3(p.y_mm + dy))
                for p in stroke.points
            ]
        for pic in pictures:
            x0, y0, x1, y1 = pic.bbox_mm
            pic.bbox_mm = (q3(x0 + dx), q3(y0 + dy), q3(x1 + dx), q3(y1 + dy))
        return dx, dy

    def review_seek(self, t_wall_ms: int, selection: Selection | None = None) -> float:
        strokes, _ = self._resolve(selection)
        if not strokes:
            raise EmptySelection("review seek needs at least one selected stroke")
        target = min(s.t_start for s in strokes)
        self.clock.seek(target, t_wall_ms)
        self.clock.play(t_wall_ms)
        return target

    def slider_seek(self, t_s: float, t_wall_ms: int) -> float:
        return self.clock.seek(t_s, t_wall_ms)

    # -- capture / embed ---------------------------------------------------

    def stage_capture(self, rect: CaptureRect, frame_t_s: float, resume_playing: bool) -> None:
        canonical = CaptureRect(q3(rect.u_min), q3(rect.v_min), q3(rect.u_max), q3(rect.v_max))
        self.pending_capture = PendingCapture(
            rect=canonical, frame_t_s=q3(frame_t_s), resume_playing=resume_playing
        )

    def embed_picture(self, sketch_points_mm: list[tuple[float, float]]) -> tuple[Picture, bool]:
        self._require_tool("glue")
        if self.pending_capture is None:
            raise NoPendingCapture("glue sketch without a finalized capture")
        if not sketch_points_mm:
            raise EmptySketch("glue sketch needs at least one point")
        xs = [min(max(float(x), 0.0), self.cfg.page_width_mm) for x, _ in sketch_points_mm]
        ys = [min(max(float(y), 0.0), self.cfg.page_height_mm) for _, y in sketch_points_mm]
        pending = self.pending_capture
        self.pending_capture = None
        picture = Picture(
            id=self._next_picture_id,
            crop=pending.rect,
            frame_t_s=pending.frame_t_s,
            bbox_mm=(q3(min(xs)), q3(min(ys)), q3(max(xs)), q3(max(ys))),
            t_lecture_s=pending.frame_t_s,
        )
        self._next_picture_id += 1
        self.notebook.page().pictures.append(picture)
        return picture, pending.resume_playing

    # -- pages -------------------------------------------------------------

    def flip_page(self, delta: int) -> FlipResult:
        book = self.notebook
        target = book.current_page + delta
        appended = False
        if target < 0:
            target = 0
        while target >= len(book.pages):
            book.pages.append(Page())
            appended = True
        moved = target != book.current_page
        book.current_page = target
        return FlipResult(page_index=target, moved=moved, appended=appended)

    # -- metrics -------------------------------------------------------------

    def character_diagonal(self, selection: Selection | None = None) -> float:
        """Diagonal of the bounding box of the selected strokes, in centimeters."""
        strokes, _ = self._resolve(selection)
        if not strokes:
            raise EmptySelection("diagonal needs at least one selected stroke")
        xs = [p.x_mm for s in strokes for p in s.points]
        ys = [p.y_mm for s in strokes for p in s.points]
        return math.hypot(max(xs) - min(xs), max(ys) - min(ys)) / 10.0
