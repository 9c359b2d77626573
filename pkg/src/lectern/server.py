"""Local HTTP service: session lifecycle, batched event ingestion, clock
reads, page render data, document export, and benchmark runs.

Sessions are kept in memory; within a session events apply strictly in
seq order under a lock, while reads serve snapshots.
"""
from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .bench import bench_tracking
from .config import AppConfig
from .session import ApplyOutcome, Session, SessionEvent, SequenceGap
from .simulator import UnknownScenario


class CreateSessionRequest(BaseModel):
    duration_s: float = Field(default=1800.0, gt=0)


class EventIn(BaseModel):
    seq: int
    kind: str
    payload: dict = Field(default_factory=dict)
    t_wall_ms: int | None = None


class EventBatch(BaseModel):
    events: list[EventIn]


class BenchRequest(BaseModel):
    scenario: str
    frames: int = Field(default=200, ge=1, le=5000)
    seed: int = 0


@dataclass
class _Entry:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    started_ns: int = field(default_factory=time.perf_counter_ns)

    def now_ms(self) -> int:
        return (time.perf_counter_ns() - self.started_ns) // 1_000_000


def _outcome_dict(outcome: ApplyOutcome) -> dict:
    d = {"seq": outcome.seq, "status": outcome.status}
    if outcome.reason is not None:
        d["reason"] = outcome.reason
    if outcome.result is not None:
        d["result"] = outcome.result
    return d


def create_app(cfg: AppConfig = AppConfig(), frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="lectern session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, _Entry] = {}

    def entry_of(session_id: str) -> _Entry:
        entry = sessions.get(session_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return entry

    @app.post("/api/sessions")
    def create_session(req: CreateSessionRequest) -> dict:
        session_id = uuid.uuid4().hex[:12]
        sessions[session_id] = _Entry(session=Session(req.duration_s, cfg))
        return {"session_id": session_id, "duration_s": req.duration_s}

    @app.post("/api/sessions/{session_id}/events")
    def append_events(session_id: str, batch: EventBatch) -> dict:
        entry = entry_of(session_id)
        results: list[dict] = []
        with entry.lock:
            session = entry.session
            for item in batch.events:
                if item.seq <= session.last_seq:
                    results.append({"seq": item.seq, "status": "duplicate"})
                    continue
                t_wall = item.t_wall_ms if item.t_wall_ms is not None else entry.now_ms()
                event = SessionEvent(item.seq, int(t_wall), item.kind, item.payload)
                try:
                    outcome = session.apply(event)
                except SequenceGap as exc:
                    results.append({"seq": item.seq, "status": "gap", "reason": str(exc)})
                    continue
                results.append(_outcome_dict(outcome))
            clock = session.clock_view(entry.now_ms())
        return {"results": results, "clock": clock}

    @app.get("/api/sessions/{session_id}/clock")
    def get_clock(session_id: str) -> dict:
        entry = entry_of(session_id)
        with entry.lock:
            return entry.session.clock_view(entry.now_ms())

    @app.get("/api/sessions/{session_id}/pages/{page_index}")
    def get_page(session_id: str, page_index: int) -> dict:
        entry = entry_of(session_id)
        with entry.lock:
            try:
                return entry.session.page_render(page_index)
            except ValueError as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get("/api/sessions/{session_id}/document", response_class=PlainTextResponse)
    def get_document(session_id: str) -> str:
        entry = entry_of(session_id)
        with entry.lock:
            return entry.session.export_text()

    @app.post("/api/bench")
    def run_bench(req: BenchRequest) -> dict:
        try:
            report = bench_tracking(req.scenario, req.frames, cfg, seed=req.seed)
        except UnknownScenario as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "scenario": report.scenario,
            "frames": report.frames,
            "tip_rmse_mm": report.tip_rmse_mm,
            "axis_rmse_deg": report.axis_rmse_deg,
            "lost_rate": report.lost_rate,
            "max_coast_run": report.max_coast_run,
            "latency_us": report.latency_us,
        }

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="app")

    return app
