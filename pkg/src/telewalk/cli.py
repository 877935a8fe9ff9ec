"""Command-line entry point.

Subcommands:
  run      run one scenario; writes trace.csv, events.jsonl, summary.json
  suite    run every scenario in a directory and evaluate embedded thresholds
  metrics  recompute a summary from a recorded trace
  serve    start the live-session server for the cockpit UI

Exit codes (stable): 0 success, 2 usage or configuration error,
3 run completed but the robot fell, 4 numerical divergence.
The default output directory comes from $TELEWALK_OUTDIR when set.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
from pathlib import Path

from .config import OverrideError, ScenarioConfig, apply_overrides, load_scenario
from .engine import compute_metrics, run_scenario, save_outputs
from .trace import SimTrace

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FALL = 3
EXIT_DIVERGED = 4


def _default_outdir(name: str) -> Path:
    base = os.environ.get("TELEWALK_OUTDIR", "out")
    return Path(base) / name


def _load_config(path: str, overrides: list[str]) -> ScenarioConfig:
    p = Path(path)
    if not p.is_file():
        raise SystemExit2(f"config file not found: {path}")
    try:
        cfg = load_scenario(p)
    except Exception as exc:
        raise SystemExit2(f"invalid config {path}: {exc}")
    if overrides:
        try:
            cfg = apply_overrides(cfg, overrides)
        except OverrideError as exc:
            raise SystemExit2(str(exc))
    return cfg


class SystemExit2(Exception):
    """Usage-level failure; printed to stderr, exit code 2."""


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.set or [])
    outdir = Path(args.outdir) if args.outdir else _default_outdir(cfg.name)
    try:
        result = run_scenario(cfg)
    except FileNotFoundError as exc:
        # e.g. a pilot command_log or replay trace path that does not exist
        raise SystemExit2(str(exc))
    paths = save_outputs(result, outdir)
    s = result.summary
    print(
        f"{cfg.name}: steps={s.step_count} distance={s.distance_m:.3f} m "
        f"top={s.top_speed_mps:.3f} m/s rms_dcm={s.rms_dcm_error:.4f} "
        f"fall={s.fall} diverged={s.diverged}"
    )
    print(f"outputs: {paths['trace'].parent}")
    if s.diverged:
        return EXIT_DIVERGED
    if s.fall:
        return EXIT_FALL
    return EXIT_OK


def _check_thresholds(summary, thresholds) -> list[str]:
    failures = []
    s, t = summary, thresholds
    if t.min_steps is not None and s.step_count < t.min_steps:
        failures.append(f"steps {s.step_count} < {t.min_steps}")
    if t.max_steps is not None and s.step_count > t.max_steps:
        failures.append(f"steps {s.step_count} > {t.max_steps}")
    if t.min_distance_m is not None and s.distance_m < t.min_distance_m:
        failures.append(f"distance {s.distance_m:.3f} < {t.min_distance_m}")
    if t.max_mean_abs_speed is not None and s.mean_abs_speed_mps > t.max_mean_abs_speed:
        failures.append(f"mean |v| {s.mean_abs_speed_mps:.3f} > {t.max_mean_abs_speed}")
    if t.max_rms_dcm_error is not None and s.rms_dcm_error > t.max_rms_dcm_error:
        failures.append(f"rms dcm {s.rms_dcm_error:.4f} > {t.max_rms_dcm_error}")
    if t.top_speed_range is not None:
        lo, hi = t.top_speed_range
        if not (lo <= s.top_speed_mps <= hi):
            failures.append(f"top speed {s.top_speed_mps:.3f} outside [{lo}, {hi}]")
    if t.max_resync_steps is not None:
        for n in s.resync_steps:
            if n is None or n > t.max_resync_steps:
                failures.append(f"resynchronization took {n} steps > {t.max_resync_steps}")
    if t.require_no_fall and (s.fall or s.diverged):
        failures.append(f"fall={s.fall} diverged={s.diverged}")
    return failures


def cmd_suite(args: argparse.Namespace) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise SystemExit2(f"not a directory: {args.dir}")
    configs = sorted(directory.glob("*.json"))
    if not configs:
        raise SystemExit2(f"no scenario configs in {args.dir}")
    outbase = Path(args.outdir) if args.outdir else _default_outdir("suite")
    report = {"scenarios": [], "passed": True}
    for path in configs:
        cfg = _load_config(str(path), [])
        result = run_scenario(cfg)
        save_outputs(result, outbase / cfg.name)
        entry: dict = {"config": path.name, "summary": result.summary.to_json()}
        if cfg.acceptance is not None:
            failures = _check_thresholds(result.summary, cfg.acceptance)
            # a final-stop check needs the trace tail, not just the summary
            if cfg.acceptance.final_stop_speed is not None:
                window = int(round(1.0 / cfg.dt_s))
                tail = result.trace.column("xdot_r_mps")[-window - 1 :]
                worst = max(abs(v) for v in tail) if tail else 0.0
                if worst > cfg.acceptance.final_stop_speed:
                    failures.append(
                        f"final-second speed {worst:.3f} > {cfg.acceptance.final_stop_speed}"
                    )
            entry["failures"] = failures
            entry["passed"] = not failures
            report["passed"] = report["passed"] and not failures
        status = "pass" if entry.get("passed", True) else "FAIL"
        print(f"{cfg.name}: {status}" + (f" ({'; '.join(entry.get('failures', []))})" if entry.get("failures") else ""))
        report["scenarios"].append(entry)
    outbase.mkdir(parents=True, exist_ok=True)
    with open(outbase / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"report: {outbase / 'report.json'}")
    return EXIT_OK if report["passed"] else 1


def cmd_metrics(args: argparse.Namespace) -> int:
    trace_path = Path(args.trace)
    if not trace_path.is_file():
        raise SystemExit2(f"trace file not found: {args.trace}")
    trace = SimTrace.read_csv(trace_path)
    events_path = Path(args.events) if args.events else trace_path.with_name("events.jsonl")
    events = SimTrace.read_events(events_path) if events_path.is_file() else []
    summary = compute_metrics(trace, events, synchrony_threshold=args.threshold)
    payload = json.dumps(summary.to_json(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(payload)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load_config(args.config, args.set or [])
    if args.headless_pilot:
        cfg = apply_overrides(cfg, [f"pilot={json.dumps({'kind': args.headless_pilot})}"])
    if not (0 < args.port < 65536):
        raise SystemExit2(f"invalid port {args.port}")
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        raise SystemExit2(f"cannot bind {args.host}:{args.port}: {exc}")
    finally:
        probe.close()

    ui_dir = args.ui_dir
    if ui_dir is None:
        # editable install layout: <repo>/src/telewalk/cli.py -> <repo>/frontend/dist
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(bundled) if bundled.is_dir() else None
    app = create_app(
        cfg,
        realtime=not args.no_realtime,
        snapshot_hz=args.snapshot_hz,
        outdir=args.outdir or _default_outdir(f"session_{cfg.name}"),
        ui_dir=ui_dir,
    )
    print(f"serving on http://{args.host}:{args.port} (WebSocket at /session)")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telewalk",
        description="Pilot-synchronized bipedal walking simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--outdir")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config field by dotted path")
    p_run.set_defaults(func=cmd_run)

    p_suite = sub.add_parser("suite", help="run a directory of scenarios")
    p_suite.add_argument("--dir", required=True)
    p_suite.add_argument("--outdir")
    p_suite.set_defaults(func=cmd_suite)

    p_metrics = sub.add_parser("metrics", help="recompute a summary from a trace")
    p_metrics.add_argument("--trace", required=True)
    p_metrics.add_argument("--events")
    p_metrics.add_argument("--threshold", type=float, default=0.05)
    p_metrics.add_argument("--out")
    p_metrics.set_defaults(func=cmd_metrics)

    p_serve = sub.add_parser("serve", help="start the live-session server")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8700)
    p_serve.add_argument("--snapshot-hz", type=float, default=60.0)
    p_serve.add_argument("--no-realtime", action="store_true",
                         help="run the session as fast as possible (testing)")
    p_serve.add_argument("--headless-pilot",
                         choices=["periodic", "lean_walk", "reactive"],
                         help="replace the pilot with a synthetic one (spectator mode)")
    p_serve.add_argument("--ui-dir", help="directory of cockpit static files")
    p_serve.add_argument("--outdir", help="where session recordings are written")
    p_serve.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
