#!/usr/bin/env python3
"""Scripted note-taking session: writes strokes against a playing lecture
clock, erases a mistake, cuts and moves a block, captures a slide region,
embeds it, review-seeks, then exports the document and replays it.

Usage: python3 scripts/demo_session.py [--out session.json]
"""
from __future__ import annotations

import argparse

from lectern.session import Session, SessionEvent, replay_text

HEAD = {"eye": [0.0, 0.0, 0.0], "forward": [0.0, 1.0, 0.0], "up": [0.0, 0.0, 1.0]}


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="demo_session.json")
    args = parser.parse_args()

    session = Session(duration_s=1800.0)
    seq = 0
    wall = 0

    def feed(kind, payload=None, advance_ms=40):
        nonlocal seq, wall
        seq += 1
        wall += advance_ms
        outcome = session.apply(SessionEvent(seq, wall, kind, payload or {}))
        flag = "ok " if outcome.status == "applied" else "REJ"
        print(f"  [{flag}] #{seq:<3} {kind:<14} {outcome.result or outcome.reason or ''}")
        return outcome

    print("writing two lines of notes while the lecture plays:")
    feed("clock-play")
    feed("slider-seek", {"t_s": 95.0})
    feed("stroke-begin", {"x_mm": 20.0, "y_mm": 40.0})
    for x in range(25, 90, 5):
        feed("stroke-point", {"x_mm": float(x), "y_mm": 40.0 + (x % 10)}, advance_ms=15)
    feed("stroke-end")
    feed("stroke-begin", {"x_mm": 20.0, "y_mm": 60.0})
    feed("stroke-point", {"x_mm": 70.0, "y_mm": 62.0})
    feed("stroke-end")

    print("erasing part of the second line:")
    feed("tool-cycle", {"tool": "eraser"})
    feed("erase", {"x_mm": 70.0, "y_mm": 62.0, "radius_mm": 6.0})

    print("cutting the first line and moving it down:")
    feed("tool-cycle", {"tool": "knife"})
    feed("knife-select", {"x0_mm": 10, "y0_mm": 30, "x1_mm": 100, "y1_mm": 55})
    feed("move", {"dx_mm": 0.0, "dy_mm": 90.0})

    print("capturing a slide region and gluing it into the page:")
    pinch = {
        "left": [-0.15, 0.6, 0.45],
        "right": [0.15, 0.6, 0.55],
        "head": HEAD,
    }
    feed("pinch-start", pinch)
    feed("pinch-move", {**pinch, "left": [-0.2, 0.6, 0.42]})
    feed("unpinch")
    feed("tool-cycle", {"tool": "glue"})
    feed("glue-sketch", {"points_mm": [[110, 120], [190, 180]]})

    print("review: select the moved line with the marker and seek to it:")
    feed("tool-cycle", {"tool": "marker"})
    feed("marker-select", {"x0_mm": 10, "y0_mm": 120, "x1_mm": 100, "y1_mm": 155})
    feed("review-seek")

    text = session.export_text()
    with open(args.out, "w") as fh:
        fh.write(text)
    print(f"\nexported {len(text)} bytes to {args.out}")

    replayed = replay_text(text)
    assert replayed.export_text() == text
    book = replayed.engine.notebook
    strokes = sum(len(p.strokes) for p in book.pages)
    pictures = sum(len(p.pictures) for p in book.pages)
    print(f"replay verified: {len(replayed.events)} events -> {strokes} strokes, {pictures} picture(s)")


if __name__ == "__main__":
    main()
