"""Service-side checks of the exact flows and payload conventions the
browser client emits (head pose, pinch depth, event ordering), so client
and service cannot drift apart silently.
"""
import pytest
from fastapi.testclient import TestClient

from lectern.server import create_app
from lectern.session import replay_text

HEAD = {"eye": [0.0, 0.0, 0.5], "forward": [0.0, 1.0, 0.0], "up": [0.0, 0.0, 1.0]}


def pinch_point(u, v, frac=0.5):
    # mirrors frontend mapping: fingertip halfway along the eye->slide ray
    eye = [0.0, 0.0, 0.5]
    target = [u, 1.2, 0.5 + v]
    return [round(e + (t - e) * frac, 3) for e, t in zip(eye, target)]


@pytest.fixture()
def client():
    return TestClient(create_app())


def apply_all(client, sid, events):
    resp = client.post(f"/api/sessions/{sid}/events", json={"events": events})
    assert resp.status_code == 200
    body = resp.json()
    by_seq = {r["seq"]: r for r in body["results"]}
    for r in body["results"]:
        assert r["status"] == "applied", r
    return by_seq, body["clock"]


def test_draw_then_marker_select_seeks_to_stroke_start(client):
    sid = client.post("/api/sessions", json={"duration_s": 1800}).json()["session_id"]
    results, _ = apply_all(client, sid, [
        {"seq": 1, "kind": "clock-play", "payload": {}, "t_wall_ms": 0},
        {"seq": 2, "kind": "slider-seek", "payload": {"t_s": 120.0}, "t_wall_ms": 10},
        {"seq": 3, "kind": "stroke-begin", "payload": {"x_mm": 30, "y_mm": 40}, "t_wall_ms": 500},
        {"seq": 4, "kind": "stroke-point", "payload": {"x_mm": 50, "y_mm": 42}, "t_wall_ms": 600},
        {"seq": 5, "kind": "stroke-end", "payload": {}, "t_wall_ms": 700},
        {"seq": 6, "kind": "tool-cycle", "payload": {"tool": "marker"}, "t_wall_ms": 800},
        {"seq": 7, "kind": "marker-select",
         "payload": {"x0_mm": 20, "y0_mm": 30, "x1_mm": 60, "y1_mm": 50}, "t_wall_ms": 900},
        {"seq": 8, "kind": "review-seek", "payload": {}, "t_wall_ms": 1000},
    ])
    assert results[8]["result"]["t_lecture_s"] == results[5]["result"]["t_start_s"]
    assert results[8]["result"]["playing"] is True


def test_capture_drag_pauses_glue_resumes_and_replays(client):
    sid = client.post("/api/sessions", json={"duration_s": 1800}).json()["session_id"]
    apply_all(client, sid, [
        {"seq": 1, "kind": "clock-play", "payload": {}, "t_wall_ms": 0},
    ])
    results, clock = apply_all(client, sid, [
        {"seq": 2, "kind": "pinch-start",
         "payload": {"left": pinch_point(-0.3, -0.2), "right": pinch_point(0.3, 0.2),
                     "head": HEAD}, "t_wall_ms": 2000},
        {"seq": 3, "kind": "pinch-move",
         "payload": {"left": pinch_point(-0.35, -0.22), "right": pinch_point(0.3, 0.2),
                     "head": HEAD}, "t_wall_ms": 2100},
        {"seq": 4, "kind": "unpinch", "payload": {}, "t_wall_ms": 2200},
        {"seq": 5, "kind": "tool-cycle", "payload": {"tool": "glue"}, "t_wall_ms": 2300},
        {"seq": 6, "kind": "glue-sketch",
         "payload": {"points_mm": [[110, 120], [190, 180]]}, "t_wall_ms": 2400},
    ])
    assert results[2]["result"]["paused"] is True
    assert results[6]["result"]["resumed"] is True
    assert results[6]["result"]["bbox_mm"] == [110.0, 120.0, 190.0, 180.0]

    page = client.get(f"/api/sessions/{sid}/pages/0").json()
    assert page["pictures"][0]["bbox_mm"] == [110.0, 120.0, 190.0, 180.0]

    # the captured rect covers the dragged slide region (fine-tuned by the move)
    crop = page["pictures"][0]["crop"]
    assert crop[0] == pytest.approx(-0.35, abs=1e-9)
    assert crop[2] == pytest.approx(0.3, abs=1e-9)

    text = client.get(f"/api/sessions/{sid}/document").text
    assert replay_text(text).export_text() == text


def test_cancel_capture_resumes_without_picture(client):
    sid = client.post("/api/sessions", json={"duration_s": 600}).json()["session_id"]
    apply_all(client, sid, [
        {"seq": 1, "kind": "clock-play", "payload": {}, "t_wall_ms": 0},
        {"seq": 2, "kind": "pinch-start",
         "payload": {"left": pinch_point(-0.2, -0.1), "right": pinch_point(0.2, 0.1),
                     "head": HEAD}, "t_wall_ms": 100},
        {"seq": 3, "kind": "unpinch", "payload": {}, "t_wall_ms": 200},
        # the client's cancel path: just resume, never glue
        {"seq": 4, "kind": "clock-play", "payload": {}, "t_wall_ms": 300},
    ])
    clock = client.get(f"/api/sessions/{sid}/clock").json()
    assert clock["playing"] is True
    page = client.get(f"/api/sessions/{sid}/pages/0").json()
    assert page["pictures"] == []
