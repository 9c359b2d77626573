import math

import numpy as np
import pytest

from lectern.gestures import CaptureRect
from lectern.notes import (
    AppendWithoutBegin,
    EmptySelection,
    EmptySketch,
    NoPendingCapture,
    NoteEngine,
    Selection,
    StrokeAlreadyActive,
    TimestampRegression,
    ToolMismatch,
    TOOL_ORDER,
)


@pytest.fixture
def engine():
    return NoteEngine(duration_s=1800.0)


def draw(engine, points, t0=0, dt=20, pressure=None):
    """Draw a stroke through the given (x, y) points, 'dt' wall-ms apart."""
    engine.begin_stroke(points[0][0], points[0][1], t0, pressure)
    for i, (x, y) in enumerate(points[1:], start=1):
        engine.append_point(x, y, t0 + i * dt, pressure)
    return engine.end_stroke().stroke


# -- recording -----------------------------------------------------------------


def test_points_stamped_from_playing_clock(engine):
    engine.clock.seek(100.0, 0)
    engine.clock.play(0)
    stroke = draw(engine, [(10, 10), (11, 10), (12, 10)], t0=0, dt=50)
    stamps = [p.t_lecture_s for p in stroke.points]
    assert stroke.t_start == pytest.approx(100.0)
    assert stamps == sorted(stamps)
    assert stamps[-1] == pytest.approx(100.1)


def test_points_stamped_with_paused_position(engine):
    engine.clock.seek(200.0, 0)
    stroke = draw(engine, [(10, 10), (20, 20), (30, 30)])
    assert all(p.t_lecture_s == 200.0 for p in stroke.points)


def test_append_without_begin(engine):
    with pytest.raises(AppendWithoutBegin):
        engine.append_point(5, 5, 0)
    with pytest.raises(AppendWithoutBegin):
        engine.end_stroke()


def test_begin_twice_rejected(engine):
    engine.begin_stroke(1, 1, 0)
    with pytest.raises(StrokeAlreadyActive):
        engine.begin_stroke(2, 2, 10)


def test_wall_time_must_not_regress(engine):
    engine.begin_stroke(1, 1, 100)
    with pytest.raises(TimestampRegression):
        engine.append_point(2, 2, 50)


def test_points_clamped_to_page(engine):
    engine.begin_stroke(-5.0, 10.0, 0)
    engine.append_point(500.0, 400.0, 10)
    report = engine.end_stroke()
    assert report.clamped_points == 2
    xs = [p.x_mm for p in report.stroke.points]
    ys = [p.y_mm for p in report.stroke.points]
    assert xs == [0.0, 210.0]
    assert ys == [10.0, 297.0]


def test_stroke_requires_pen_like_tool(engine):
    engine.select_tool("eraser")
    with pytest.raises(ToolMismatch):
        engine.begin_stroke(1, 1, 0)


def test_marker_strokes_are_highlights(engine):
    engine.select_tool("marker")
    stroke = draw(engine, [(10, 10), (12, 10)])
    assert stroke.tool == "marker-highlight"
    assert stroke.width_mm > 1.2


# -- eraser ------------------------------------------------------------------


def test_erase_splits_stroke_preserving_timestamps(engine):
    stroke = draw(engine, [(10, 10), (20, 10), (30, 10)])
    original_stamps = [(p.t_lecture_s, p.t_wall_ms) for p in stroke.points]
    engine.select_tool("eraser")
    report = engine.erase_at(20, 10, 2.0)
    assert report.removed_points == 1
    assert report.deleted_stroke_ids == [stroke.id]
    page = engine.notebook.page()
    assert [len(s.points) for s in page.strokes] == [1, 1]
    kept = [(p.t_lecture_s, p.t_wall_ms) for s in page.strokes for p in s.points]
    assert kept == [original_stamps[0], original_stamps[2]]
    assert all(s.id != stroke.id for s in page.strokes)


def test_erase_far_away_is_noop(engine):
    draw(engine, [(10, 10), (20, 10)])
    engine.select_tool("eraser")
    before = [(s.id, tuple(p.x_mm for p in s.points)) for s in engine.notebook.page().strokes]
    report = engine.erase_at(150, 200, 5.0)
    after = [(s.id, tuple(p.x_mm for p in s.points)) for s in engine.notebook.page().strokes]
    assert report.removed_points == 0
    assert before == after


def test_erase_whole_stroke_removes_it(engine):
    draw(engine, [(10, 10), (11, 10)])
    engine.select_tool("eraser")
    report = engine.erase_at(10.5, 10, 5.0)
    assert report.removed_points == 2
    assert engine.notebook.page().strokes == []


def test_erase_requires_eraser_tool(engine):
    draw(engine, [(10, 10), (11, 10)])
    with pytest.raises(ToolMismatch):
        engine.erase_at(10, 10, 5.0)


def test_erase_matches_containment_oracle(engine):
    rng = np.random.default_rng(23)
    strokes = []
    for _ in range(8):
        pts = rng.uniform(5, 200, size=(6, 2))
        strokes.append(draw(engine, [tuple(p) for p in pts]))
    all_points = {
        s.id: [(p.x_mm, p.y_mm) for p in s.points] for s in engine.notebook.page().strokes
    }
    cx, cy, r = 100.0, 100.0, 40.0
    survivors_oracle = sorted(
        (x, y)
        for pts in all_points.values()
        for (x, y) in pts
        if (x - cx) ** 2 + (y - cy) ** 2 > r * r
    )
    engine.select_tool("eraser")
    engine.erase_at(cx, cy, r)
    survivors = sorted(
        (p.x_mm, p.y_mm) for s in engine.notebook.page().strokes for p in s.points
    )
    assert survivors == survivors_oracle


# -- selection / move / review -------------------------------------------------


def test_knife_selects_whole_strokes(engine):
    inside = draw(engine, [(50, 50), (60, 60)])
    clipped = draw(engine, [(95, 95), (150, 150)])
    outside = draw(engine, [(180, 180), (190, 190)])
    engine.select_tool("knife")
    sel = engine.knife_select(40, 40, 100, 100)
    assert sel.stroke_ids == {inside.id, clipped.id}
    assert outside.id not in sel.stroke_ids


def test_select_in_blank_region_is_empty(engine):
    draw(engine, [(50, 50), (60, 60)])
    engine.select_tool("knife")
    assert not engine.knife_select(150, 150, 160, 160)


def test_marker_select_same_rule_as_knife(engine):
    s = draw(engine, [(50, 50), (60, 60)])
    engine.select_tool("marker")
    assert engine.marker_select(40, 40, 70, 70).stroke_ids == {s.id}
    engine.select_tool("knife")
    assert engine.knife_select(40, 40, 70, 70).stroke_ids == {s.id}


def test_knife_selects_intersecting_pictures(engine):
    engine.stage_capture(rect(), 10.0, resume_playing=False)
    engine.select_tool("glue")
    picture, _ = engine.embed_picture([(100, 100), (140, 130)])
    engine.select_tool("knife")
    assert engine.knife_select(130, 120, 180, 180).picture_ids == {picture.id}
    assert not engine.knife_select(150, 140, 180, 180).picture_ids


def test_move_translates_pictures(engine):
    engine.stage_capture(rect(), 10.0, resume_playing=False)
    engine.select_tool("glue")
    picture, _ = engine.embed_picture([(100, 100), (140, 130)])
    engine.select_tool("knife")
    engine.knife_select(90, 90, 150, 140)
    engine.move_selection(10.0, -20.0)
    assert picture.bbox_mm == (110.0, 80.0, 150.0, 110.0)
    assert picture.t_lecture_s == 10.0


def test_move_translates_exactly_and_inverts(engine):
    stroke = draw(engine, [(50, 50), (60, 60)])
    engine.select_tool("knife")
    engine.knife_select(40, 40, 70, 70)
    original = [(p.x_mm, p.y_mm, p.t_lecture_s, p.t_wall_ms) for p in stroke.points]

    dx, dy = engine.move_selection(10.0, -5.0)
    assert (dx, dy) == (10.0, -5.0)
    moved = engine.notebook.find_stroke(stroke.id)[1]
    assert [(p.x_mm, p.y_mm) for p in moved.points] == [(60.0, 45.0), (70.0, 55.0)]
    assert [p.t_lecture_s for p in moved.points] == [t for _, _, t, _ in original]

    engine.move_selection(-10.0, 5.0)
    back = engine.notebook.find_stroke(stroke.id)[1]
    assert [(p.x_mm, p.y_mm, p.t_lecture_s, p.t_wall_ms) for p in back.points] == original


def test_move_clamps_to_page(engine):
    stroke = draw(engine, [(5, 5), (10, 10)])
    engine.select_tool("knife")
    engine.knife_select(0, 0, 20, 20)
    dx, dy = engine.move_selection(-50.0, -50.0)
    assert (dx, dy) == (-5.0, -5.0)
    moved = engine.notebook.find_stroke(stroke.id)[1]
    assert min(p.x_mm for p in moved.points) == 0.0


def test_move_empty_selection(engine):
    with pytest.raises(EmptySelection):
        engine.move_selection(1.0, 1.0)


def test_review_seek_single_stroke(engine):
    engine.clock.seek(312.4, 0)
    stroke = draw(engine, [(10, 10), (12, 12)])
    t = engine.review_seek(1000, Selection(stroke_ids=frozenset({stroke.id})))
    assert t == pytest.approx(312.4)
    assert engine.clock.playing
    assert engine.clock.position_at(1000) == pytest.approx(312.4)


def test_review_seek_minimum_rule(engine):
    ids = []
    for t_start in (100.0, 85.5, 90.2):
        engine.clock.seek(t_start, 0)
        ids.append(draw(engine, [(10, 10), (12, 12)]).id)
    t = engine.review_seek(5000, Selection(stroke_ids=frozenset(ids)))
    assert t == pytest.approx(85.5)


def test_review_seek_monotone_under_superset(engine):
    ids = []
    for t_start in (50.0, 40.0, 60.0, 30.0):
        engine.clock.seek(t_start, 0)
        ids.append(draw(engine, [(10, 10), (12, 12)]).id)
    rng = np.random.default_rng(4)
    for _ in range(30):
        k = int(rng.integers(1, len(ids)))
        subset = list(rng.choice(ids, size=k, replace=False))
        extra = [i for i in ids if i not in subset]
        t_small = engine.review_seek(0, Selection(stroke_ids=frozenset(subset)))
        t_big = engine.review_seek(0, Selection(stroke_ids=frozenset(subset + extra[:1])))
        assert t_big <= t_small


def test_review_seek_empty(engine):
    with pytest.raises(EmptySelection):
        engine.review_seek(0, Selection())


def test_slider_seek_clamps(engine):
    assert engine.slider_seek(-5.0, 0) == 0.0
    assert engine.slider_seek(engine.clock.duration_s + 10, 0) == engine.clock.duration_s
    assert engine.slider_seek(30.0, 0) == 30.0


# -- capture / embed ------------------------------------------------------------


def rect():
    return CaptureRect(-0.4, -0.2, 0.4, 0.2)


def test_embed_bbox_is_sketch_bounding_box(engine):
    engine.stage_capture(rect(), 140.0, resume_playing=False)
    engine.select_tool("glue")
    picture, resume = engine.embed_picture([(10, 20), (60, 50), (30, 30)])
    assert picture.bbox_mm == (10.0, 20.0, 60.0, 50.0)
    assert picture.t_lecture_s == pytest.approx(140.0)
    assert resume is False
    assert engine.pending_capture is None


def test_embed_without_capture(engine):
    engine.select_tool("glue")
    with pytest.raises(NoPendingCapture):
        engine.embed_picture([(10, 20)])


def test_embed_empty_sketch(engine):
    engine.stage_capture(rect(), 10.0, resume_playing=True)
    engine.select_tool("glue")
    with pytest.raises(EmptySketch):
        engine.embed_picture([])


# -- pages ------------------------------------------------------------------------


def test_flip_back_at_first_page_is_noop(engine):
    result = engine.flip_page(-1)
    assert result.page_index == 0
    assert not result.moved
    assert not result.appended


def test_flip_forward_past_last_appends(engine):
    result = engine.flip_page(1)
    assert result.page_index == 1
    assert result.appended
    assert len(engine.notebook.pages) == 2


def test_flip_back_from_later_page(engine):
    engine.flip_page(1)
    engine.flip_page(1)
    result = engine.flip_page(-1)
    assert result.page_index == 1
    assert result.moved


# -- metrics / tools ----------------------------------------------------------------


def test_character_diagonal_3_4_5(engine):
    s = draw(engine, [(100, 100), (130, 140)])
    assert engine.character_diagonal(Selection(stroke_ids=frozenset({s.id}))) == pytest.approx(5.0, abs=1e-9)


def test_character_diagonal_single_point(engine):
    engine.begin_stroke(50, 50, 0)
    s = engine.end_stroke().stroke
    assert engine.character_diagonal(Selection(stroke_ids=frozenset({s.id}))) == 0.0


def test_character_diagonal_unit_box(engine):
    s = draw(engine, [(100, 100), (110, 110)])
    got = engine.character_diagonal(Selection(stroke_ids=frozenset({s.id})))
    assert got == pytest.approx(math.sqrt(2), abs=1e-9)


def test_cycle_tool_order_and_wraparound(engine):
    assert engine.cycle_tool("forward") == "eraser"
    engine.select_tool("stylus")
    assert engine.cycle_tool("back") == "knife"
    engine.select_tool("stylus")
    for _ in range(len(TOOL_ORDER)):
        engine.cycle_tool("forward")
    assert engine.tool == "stylus"


# -- timestamp immutability ------------------------------------------------------------


def test_editing_never_touches_timestamps(engine):
    engine.clock.seek(42.0, 0)
    engine.clock.play(0)
    strokes = [
        draw(engine, [(20, 20), (40, 40), (60, 60)], t0=100),
        draw(engine, [(80, 80), (100, 100)], t0=400),
    ]
    stamps_by_wall = {
        p.t_wall_ms: p.t_lecture_s
        for s in engine.notebook.page().strokes
        for p in s.points
    }

    engine.select_tool("knife")
    engine.knife_select(10, 10, 120, 120)
    engine.move_selection(5.0, 5.0)
    engine.flip_page(1)
    engine.flip_page(-1)
    engine.stage_capture(rect(), 99.0, resume_playing=False)
    engine.select_tool("glue")
    engine.embed_picture([(150, 150), (170, 170)])
    engine.select_tool("eraser")
    engine.erase_at(40, 40, 3.0)

    for s in engine.notebook.page().strokes:
        for p in s.points:
            assert stamps_by_wall[p.t_wall_ms] == p.t_lecture_s
