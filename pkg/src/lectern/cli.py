"""Command line entry points: serve, bench, replay --verify, export-frames."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import bench_tracking, write_csv
from .config import ENV_CONFIG_PATH, load_config
from .session import IntegrityMismatch, replay_text
from .simulator import export_frames, make_scenario


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        default=None,
        help=f"JSON config file (default: ${ENV_CONFIG_PATH} if set)",
    )


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    cfg = load_config(args.config)
    frontend = args.frontend
    if frontend is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        frontend = candidate if candidate.is_dir() else None
    app = create_app(cfg, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    report = bench_tracking(args.scenario, args.frames, cfg, seed=args.seed)
    for line in report.summary_lines():
        print(line)
    if args.out:
        write_csv(report, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    text = Path(args.session_file).read_text()
    try:
        session = replay_text(text, cfg)
    except IntegrityMismatch as exc:
        print(f"INTEGRITY MISMATCH: {exc}", file=sys.stderr)
        return 1
    book = session.engine.notebook
    strokes = sum(len(p.strokes) for p in book.pages)
    pictures = sum(len(p.pictures) for p in book.pages)
    print(
        f"replayed {len(session.events)} events -> "
        f"{len(book.pages)} pages, {strokes} strokes, {pictures} pictures"
    )
    if args.verify:
        print("verify: replayed state matches the stored notebook")
    return 0


def _cmd_export_frames(args: argparse.Namespace) -> int:
    scenario = make_scenario(args.scenario, seed=args.seed)
    written = export_frames(scenario, args.frames, args.dir)
    print(f"wrote {len(written)} portable graymap files to {args.dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lectern")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the local session service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8707)
    p_serve.add_argument("--frontend", default=None, help="directory of built web client")
    _add_common(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    p_bench = sub.add_parser("bench", help="run a tracking benchmark scenario")
    p_bench.add_argument("--scenario", required=True)
    p_bench.add_argument("--frames", type=int, default=1000)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default=None, help="write per-frame CSV here")
    _add_common(p_bench)
    p_bench.set_defaults(func=_cmd_bench)

    p_replay = sub.add_parser("replay", help="fold a session document and verify it")
    p_replay.add_argument("session_file")
    p_replay.add_argument("--verify", action="store_true")
    _add_common(p_replay)
    p_replay.set_defaults(func=_cmd_replay)

    p_export = sub.add_parser("export-frames", help="dump simulator frames as PGM files")
    p_export.add_argument("--scenario", required=True)
    p_export.add_argument("--frames", type=int, default=10)
    p_export.add_argument("--seed", type=int, default=0)
    p_export.add_argument("--dir", required=True)
    _add_common(p_export)
    p_export.set_defaults(func=_cmd_export_frames)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
