"""Command-line front end.

Subcommands cover the whole workflow: validate and pretty-print motion
files, replay a recorded teaching trace into a threshold set, reproduce
a taught motion, chain motions from a plan file, export trajectories
from session logs, dump the default calibration, and serve the line-JSON
teach protocol over TCP.

The --config flag (or the SEATWALK_CONFIG environment variable) points
at a key=value calibration file; anything unspecified keeps its default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from typing import List, Optional, Tuple

from .ctm import CtmError, MotionSpec, ThresholdSet
from .dsl import MotionParseError, builtin_motions, load_motion_text, parse_motion, print_motion
from .plant import PlantError
from .runtime import (
    LogError,
    Runtime,
    RuntimeConfig,
    export_trajectory,
    load_log,
    load_trace,
    replay_log,
    run_teach_trace,
    runtime_config_from_text,
    runtime_config_to_text,
    save_log,
)

CONFIG_ENV = "SEATWALK_CONFIG"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_FALL = 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _load_config(path: Optional[str]) -> RuntimeConfig:
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        return RuntimeConfig()
    with open(path) as fh:
        return runtime_config_from_text(fh.read())


def _resolve_motion(ref: str) -> MotionSpec:
    motions = builtin_motions()
    if ref in motions:
        return motions[ref]
    with open(ref) as fh:
        return load_motion_text(fh.read())


def _published_thresholds(name: str) -> Optional[ThresholdSet]:
    path = resources.files("seatwalk").joinpath(f"data/thresholds/{name}.json")
    if not path.is_file():
        return None
    data = json.loads(path.read_text())
    return ThresholdSet(data["motion"], tuple(float(v) for v in data["values"]))


def _load_thresholds(path: Optional[str], motion: MotionSpec) -> Optional[ThresholdSet]:
    if path is not None:
        with open(path) as fh:
            data = json.load(fh)
        return ThresholdSet(data["motion"], tuple(float(v) for v in data["values"]))
    return _published_thresholds(motion.name)


def _make_runtime(args: argparse.Namespace) -> Runtime:
    config = _load_config(args.config)
    if getattr(args, "no_balancer", False):
        config.balancer_enabled = False
    return Runtime(config, seed=args.seed)


def _loop_summary(runtime: Runtime) -> List[str]:
    lines = []
    prev_pose = (0.0, 0.0, 0.0)
    prev_tick = 0
    for n, (tick, pose) in enumerate(runtime.loop_marks, start=1):
        dx, dy = pose[0] - prev_pose[0], pose[1] - prev_pose[1]
        dyaw = pose[2] - prev_pose[2]
        lines.append(
            f"loop {n}: dx={dx:+.4f} dy={dy:+.4f} dyaw={dyaw:+.2f} ticks={tick - prev_tick + 1}"
        )
        prev_pose, prev_tick = pose, tick
    x, y, yaw = runtime.plant.x, runtime.plant.y, runtime.plant.yaw
    lines.append(
        f"total: x={x:+.4f} y={y:+.4f} yaw={yaw:+.2f} ticks={runtime.tick_index}"
    )
    return lines


def _finish(runtime: Runtime, args: argparse.Namespace, reason: str) -> int:
    if getattr(args, "record", None):
        save_log(runtime.log, args.record)
    if getattr(args, "csv", None):
        export_trajectory(runtime.log, args.csv)
    for line in _loop_summary(runtime):
        print(line)
    if reason == "fall":
        print("fall")
        return EXIT_FALL
    if reason != "done":
        return _fail(f"run ended with {reason}")
    return EXIT_OK


# -- subcommands -------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    with open(args.motion) as fh:
        result = parse_motion(fh.read())
    for diag in result.diagnostics:
        print(f"{args.motion}:{diag}")
    if not result.ok:
        return EXIT_INVALID
    print(f"{args.motion}: ok ({result.spec.state_count} states)")
    return EXIT_OK


def cmd_print(args: argparse.Namespace) -> int:
    motion = _resolve_motion(args.motion)
    text = print_motion(motion)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_teach_replay(args: argparse.Namespace) -> int:
    motion = _resolve_motion(args.motion)
    steps = load_trace(args.trace)
    runtime = _make_runtime(args)
    taught = run_teach_trace(runtime, motion, steps)
    if args.record:
        save_log(runtime.log, args.record)
    payload = {"motion": taught.motion, "values": list(taught.values)}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
    print(json.dumps(payload))
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace) -> int:
    motion = _resolve_motion(args.motion)
    thresholds = _load_thresholds(args.thresholds, motion)
    deltas = None
    if args.deltas:
        deltas = [float(tok) for tok in args.deltas.split(",")]
    runtime = _make_runtime(args)
    runtime.load_motion(motion)
    runtime.repro_start(deltas=deltas, loops=args.loops, thresholds=thresholds)
    reason, _ = runtime.run_until_done(max_ticks=args.max_ticks)
    return _finish(runtime, args, reason)


def cmd_compose(args: argparse.Namespace) -> int:
    with open(args.plan) as fh:
        plan_data = json.load(fh)
    plan: List[Tuple[str, int]] = [
        (str(e["motion"]), int(e.get("loops", 1))) for e in plan_data
    ]
    runtime = _make_runtime(args)
    for name, _ in plan:
        if name not in runtime.thresholds:
            published = _published_thresholds(name)
            if published is not None:
                runtime.thresholds[name] = published
    runtime.compose_start(plan)
    reason, _ = runtime.run_until_done(max_ticks=args.max_ticks)
    return _finish(runtime, args, reason)


def cmd_export(args: argparse.Namespace) -> int:
    log = load_log(args.log)
    rows = export_trajectory(log, args.csv)
    print(f"wrote {rows} rows to {args.csv}")
    return EXIT_OK


def cmd_default_config(args: argparse.Namespace) -> int:
    text = runtime_config_to_text(RuntimeConfig())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_replay_check(args: argparse.Namespace) -> int:
    log = load_log(args.log)
    runtime = replay_log(log)
    same = runtime.log.events == log.events
    print("replay matches" if same else "replay DIVERGES")
    return EXIT_OK if same else EXIT_ERROR


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import TeachServer

    runtime = _make_runtime(args)
    runtime.keep_log = bool(args.record)
    server = TeachServer(runtime, host=args.host, port=args.port, fast=args.fast)
    server.start()
    print(f"listening on {server.host}:{server.port}", flush=True)
    try:
        server.run_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
        if args.record:
            save_log(runtime.log, args.record)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seatwalk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        if seeded:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--config", default=None, help="key=value calibration file")
            p.add_argument("--no-balancer", action="store_true")
            p.add_argument("--record", default=None, help="write the session log here")

    p = sub.add_parser("validate", help="check a motion file")
    p.add_argument("--motion", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("print", help="canonical form of a motion")
    p.add_argument("--motion", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_print)

    p = sub.add_parser("teach-replay", help="replay a teaching trace into thresholds")
    p.add_argument("--motion", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--out", default=None, help="write thresholds JSON here")
    common(p)
    p.set_defaults(func=cmd_teach_replay)

    p = sub.add_parser("reproduce", help="run a taught motion")
    p.add_argument("--motion", required=True)
    p.add_argument("--thresholds", default=None, help="thresholds JSON (default: published)")
    p.add_argument("--deltas", default=None, help="comma-separated per-state deltas")
    p.add_argument("--loops", type=int, default=1)
    p.add_argument("--csv", default=None, help="write the trajectory CSV here")
    p.add_argument("--max-ticks", type=int, default=20000)
    common(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("compose", help="run a plan of motions in sequence")
    p.add_argument("--plan", required=True, help="JSON list of {motion, loops}")
    p.add_argument("--csv", default=None)
    p.add_argument("--max-ticks", type=int, default=100000)
    common(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("export", help="trajectory CSV from a session log")
    p.add_argument("--log", required=True)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("default-config", help="dump the default calibration")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_default_config)

    p = sub.add_parser("replay-check", help="verify a log replays identically")
    p.add_argument("--log", required=True)
    p.set_defaults(func=cmd_replay_check)

    p = sub.add_parser("serve", help="line-JSON teach protocol over TCP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7471)
    p.add_argument("--fast", action="store_true", help="no wall-clock pacing")
    common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as err:
        return _fail(f"{err.filename}: no such file")
    except MotionParseError as err:
        for diag in err.diagnostics:
            print(diag, file=sys.stderr)
        return EXIT_INVALID
    except (CtmError, PlantError, LogError) as err:
        return _fail(f"{err.code}: {err}")
    except json.JSONDecodeError as err:
        return _fail(f"bad JSON: {err}")


if __name__ == "__main__":
    sys.exit(main())
