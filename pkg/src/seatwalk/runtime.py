"""Fixed-step session runtime tying the gait engine to the plant.

Every tick: the active reproduction session reacts to the previous
tick's sensor frame, the balancer claims the torso roll joint, and the
plant integrates the merged command set into a new frame.  Time is
virtual (tick count at a fixed rate); nothing here sleeps, so tests and
replays run as fast as the machine allows and two runs with the same
seed are identical byte for byte.

Everything that happens goes into a session log: inbound actions
(sliders, advances, session starts) at the tick that consumed them, and
outbound facts (frames, transitions, thresholds, falls).  Replaying a
log's inbound half through a fresh runtime regenerates the outbound
half exactly; that closure is what makes taught gaits portable.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .balancer import BalancerState, balancer_step, select_gains
from .ctm import (
    CtmEngine,
    CtmError,
    Mode,
    MotionSpec,
    ThresholdSet,
    motion_kind,
    reproduction_step,
    taught_thresholds,
    teach_advance,
    teach_set_command,
)
from .dsl import builtin_motions, load_motion_text, parse_motion, print_motion
from .joints import JointId, neutral_posture
from .plant import (
    PlantConfig,
    PlantError,
    config_from_text,
    config_to_text,
    plant_step,
    reset_plant,
)

LOG_VERSION = 1


class LogError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class RuntimeConfig:
    tick_rate: float = 5.0  # control periods per second of virtual time
    balancer_enabled: bool = True
    odometry_noise: float = 0.0  # std dev of reported-pose noise, m / deg
    plant: PlantConfig = field(default_factory=PlantConfig)

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate


_RUNTIME_KEYS = ("tick_rate", "balancer_enabled", "odometry_noise")


def runtime_config_to_text(config: RuntimeConfig) -> str:
    lines = [
        f"tick_rate={config.tick_rate!r}",
        f"balancer_enabled={int(config.balancer_enabled)}",
        f"odometry_noise={config.odometry_noise!r}",
    ]
    return "\n".join(lines) + "\n" + config_to_text(config.plant)


def runtime_config_from_text(text: str) -> RuntimeConfig:
    config = RuntimeConfig()
    plant_lines: List[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key = line.partition("=")[0].strip()
        if key == "tick_rate":
            config.tick_rate = float(line.partition("=")[2])
            if config.tick_rate <= 0:
                raise PlantError("config", f"line {lineno}: tick_rate must be positive")
        elif key == "balancer_enabled":
            config.balancer_enabled = bool(float(line.partition("=")[2]))
        elif key == "odometry_noise":
            config.odometry_noise = float(line.partition("=")[2])
        else:
            plant_lines.append(raw)
    config.plant = config_from_text("\n".join(plant_lines))
    return config


def config_hash(config: RuntimeConfig) -> str:
    digest = hashlib.sha256(runtime_config_to_text(config).encode()).hexdigest()
    return digest[:16]


# ---------------------------------------------------------------------------
# Session log


@dataclass
class SessionLog:
    header: Dict
    events: List[Dict] = field(default_factory=list)


def save_log(log: SessionLog, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(log.header, sort_keys=True) + "\n")
        for event in log.events:
            fh.write(json.dumps(event, sort_keys=True) + "\n")


def load_log(path: str) -> SessionLog:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise LogError("corrupt", "log file is empty")
    try:
        header = json.loads(lines[0])
        events = [json.loads(line) for line in lines[1:] if line.strip()]
    except json.JSONDecodeError as e:
        raise LogError("corrupt", f"undecodable log line: {e}") from None
    if not isinstance(header, dict) or header.get("version") != LOG_VERSION:
        raise LogError(
            "version",
            f"log version {header.get('version')!r}, expected {LOG_VERSION}",
        )
    return SessionLog(header, events)


def export_trajectory(log: SessionLog, path: str) -> int:
    """Write the per-tick trajectory CSV; returns the row count."""
    frames = [e for e in log.events if e.get("kind") == "frame"]
    if not frames:
        raise LogError("empty", "log holds no frames to export")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["tick", "x", "y", "yaw", "F_lfoot", "F_rfoot", "F_lhip", "F_rhip", "state_i", "u"]
        )
        for ev in frames:
            x, y, yaw = ev["pose"]
            f = ev["f"]
            writer.writerow(
                [
                    ev["tick"],
                    x,
                    y,
                    yaw,
                    f["F_lfoot"],
                    f["F_rfoot"],
                    f["F_lhip"],
                    f["F_rhip"],
                    "" if ev["state_i"] is None else ev["state_i"],
                    "" if ev["u"] is None else ev["u"],
                ]
            )
    return len(frames)


# ---------------------------------------------------------------------------
# Runtime


class Runtime:
    """One robot: plant, balancer, gait engine, and their shared clock."""

    def __init__(self, config: Optional[RuntimeConfig] = None, seed: int = 0):
        self.config = config or RuntimeConfig()
        self.config.plant.validate()
        self.keep_log = True  # long-lived servers may run without a log
        self.seed = seed
        self.library: Dict[str, MotionSpec] = dict(builtin_motions())
        self.thresholds: Dict[str, ThresholdSet] = {}
        self.motion: Optional[MotionSpec] = None
        self._engine = CtmEngine()
        self._queue: List[Tuple[str, int]] = []  # pending composition entries
        self._reset_state(seed)

    # -- lifecycle ---------------------------------------------------------

    def _reset_state(self, seed: int) -> None:
        self.seed = seed
        self.plant = reset_plant(self.config.plant, seed)
        self.balancer = BalancerState(enabled=self.config.balancer_enabled)
        self._kind = "translation"
        self.session = None
        self._queue = []
        self.commands: Dict[JointId, float] = neutral_posture()
        self.last_frame = None
        self.tick_index = 0
        self.frozen = False
        self.loop_marks: List[Tuple[int, Tuple[float, float, float]]] = []
        self._odom = random.Random(seed ^ 0x5EED)
        self.log = SessionLog(
            {
                "version": LOG_VERSION,
                "seed": seed,
                "started": "virtual",
                "config_hash": config_hash(self.config),
                "config": runtime_config_to_text(self.config),
            }
        )

    def reset(self, seed: Optional[int] = None) -> None:
        self._engine = CtmEngine()
        self._reset_state(self.seed if seed is None else seed)

    # -- actions (inbound) -------------------------------------------------

    def _log(self, kind: str, **payload) -> None:
        if self.keep_log:
            self.log.events.append({"tick": self.tick_index, "kind": kind, **payload})

    def load_motion(self, motion: MotionSpec) -> None:
        self.library[motion.name] = motion
        self.motion = motion
        self._log("load", motion=motion.name, text=print_motion(motion))

    def _require_motion(self) -> MotionSpec:
        if self.motion is None:
            raise CtmError("no-motion", "load a motion first")
        return self.motion

    def _switch_kind(self, motion: MotionSpec) -> None:
        kind = motion_kind(motion)
        if kind != self._kind:
            self.balancer.set_gains(*select_gains(kind))
            self._kind = kind

    def teach_start(self) -> None:
        motion = self._require_motion()
        if self.frozen:
            raise CtmError("fallen", "reset before starting a session")
        self._switch_kind(motion)
        self.session = self._engine.begin_teaching(motion)
        self.commands.update(self.session.commands)
        self._log("teach_start")

    def set_u(self, value: float) -> None:
        if self.session is None or self.session.mode is not Mode.TEACH:
            raise CtmError("wrong-mode", "no teaching session is active")
        assignments = teach_set_command(self.session, float(value))
        self.commands.update(assignments)
        self._log("slider", v=float(value))

    def advance(self) -> Dict:
        """Returns the protocol reply: a transition, or the finished
        threshold set after the last state."""
        if self.session is None or self.session.mode is not Mode.TEACH:
            raise CtmError("wrong-mode", "no teaching session is active")
        if self.last_frame is None:
            raise CtmError("no-frame", "no sensor frame yet; run a tick first")
        session = self.session
        record = teach_advance(session, self.last_frame)
        self._log("advance")
        self._log("transition", i=session.state_index, thre=record.value)
        if session.complete:
            taught = taught_thresholds(session)
            self.thresholds[session.motion.name] = taught
            values = list(taught.values)
            self._log("thresholds", values=values)
            return {"t": "thresholds", "values": values}
        return {"t": "transition", "i": session.state_index, "thre": record.value}

    def repro_start(
        self,
        deltas: Optional[Sequence[float]] = None,
        loops: int = 1,
        thresholds: Optional[ThresholdSet] = None,
    ) -> None:
        motion = self._require_motion()
        if self.frozen:
            raise CtmError("fallen", "reset before starting a session")
        if thresholds is None:
            thresholds = self.thresholds.get(motion.name)
        needs = any(st.condition.learned for st in motion.states)
        if needs and thresholds is None:
            raise CtmError("threshold-unlearned", f"no thresholds for {motion.name!r}")
        if deltas is None:
            deltas = [st.delta for st in motion.states]
        self._switch_kind(motion)
        self.session = self._engine.begin_reproduction(
            motion, thresholds, tuple(float(d) for d in deltas), loops
        )
        if thresholds is not None:
            self.thresholds[motion.name] = thresholds
        self.commands.update(self.session.commands)
        self.loop_marks = []
        self._log(
            "repro_start",
            deltas=[float(d) for d in deltas],
            loops=loops,
            thresholds=None if thresholds is None else list(thresholds.values),
        )

    def compose_start(self, plan: Sequence[Tuple[str, int]]) -> None:
        if not plan:
            raise CtmError("empty-plan", "composition plan has no entries")
        for name, loops in plan:
            motion = self.library.get(name)
            if motion is None:
                raise CtmError("no-motion", f"unknown motion {name!r}")
            if any(st.condition.learned for st in motion.states) and name not in self.thresholds:
                raise CtmError("threshold-unlearned", f"no thresholds for {name!r}")
            if loops < 1:
                raise CtmError("bad-loops", "loops must be at least 1")
            if loops > 1 and not motion.loopable:
                raise CtmError("not-loopable", f"{name!r} is a single-pass motion")
        self._log("compose", plan=[{"motion": n, "loops": c} for n, c in plan])
        self._queue = [(name, loops) for name, loops in plan]
        self.loop_marks = []
        self._start_queued()

    def _start_queued(self) -> None:
        name, loops = self._queue.pop(0)
        motion = self.library[name]
        self.motion = motion
        self._switch_kind(motion)
        self.session = self._engine.begin_reproduction(
            motion,
            self.thresholds.get(name),
            tuple(st.delta for st in motion.states),
            loops,
        )
        self.commands.update(self.session.commands)

    def set_balancer(self, on: bool) -> None:
        self.balancer.enabled = bool(on)
        self._log("balancer", on=bool(on))

    # -- the clock ---------------------------------------------------------

    def tick(self) -> List[Dict]:
        """Advance one control period; returns outbound protocol events."""
        if self.frozen:
            return []
        out: List[Dict] = []
        loop_boundary = False

        session = self.session
        if (
            session is not None
            and session.mode is Mode.REPRODUCE
            and not session.done
            and self.last_frame is not None
        ):
            try:
                step = reproduction_step(session, self.last_frame)
            except CtmError as err:
                self._log("err", code=err.code)
                out.append({"t": "err", "code": err.code})
                self.session = None
                self._queue = []
                step = None
            if step is not None:
                if step.assignments:
                    self.commands.update(step.assignments)
                if step.transition is not None:
                    last = step.transition.state_index == session.motion.state_count
                    loop_boundary = loop_boundary or last
                    self._log(
                        "transition",
                        i=session.state_index,
                        thre=step.transition.value,
                    )
                    out.append(
                        {
                            "t": "transition",
                            "i": session.state_index,
                            "thre": step.transition.value,
                        }
                    )
                if step.done:
                    if self._queue:
                        self._start_queued()
                    else:
                        self._log("done")
                        out.append({"t": "done"})
                        self.session = None

        if self.last_frame is not None:
            roll = balancer_step(
                self.balancer, self.last_frame.f_lhip, self.last_frame.f_rhip
            )
            self.commands[JointId.T_R] = roll

        frame = plant_step(self.plant, self.commands, self.config.dt)
        if self.config.odometry_noise > 0.0:
            sd = self.config.odometry_noise
            x, y, yaw = frame.pose
            frame = replace(
                frame,
                pose=(
                    x + self._odom.gauss(0.0, sd),
                    y + self._odom.gauss(0.0, sd),
                    yaw + self._odom.gauss(0.0, sd),
                ),
            )
        self.last_frame = frame

        state_i = self.session.state_index if self.session is not None else None
        u = self.session.u if self.session is not None else None
        self._log(
            "frame",
            state_i=state_i,
            u=u,
            f={
                "F_lfoot": frame.f_lfoot,
                "F_rfoot": frame.f_rfoot,
                "F_lhip": frame.f_lhip,
                "F_rhip": frame.f_rhip,
            },
            cmd={j.value: frame.commanded[j] for j in JointId},
            pose=list(frame.pose),
        )
        out.append(
            {
                "t": "telemetry",
                "tick": frame.tick,
                "state_i": state_i,
                "u": u,
                "frame": {
                    "F_lfoot": frame.f_lfoot,
                    "F_rfoot": frame.f_rfoot,
                    "F_foot": frame.f_foot,
                    "F_lhip": frame.f_lhip,
                    "F_rhip": frame.f_rhip,
                    "cmd": {j.value: frame.commanded[j] for j in JointId},
                },
                "pose": list(frame.pose),
            }
        )
        if loop_boundary:
            self.loop_marks.append((self.tick_index, frame.pose))
        if self.plant.fallen:
            self._log("fall")
            out.append({"t": "fall"})
            self.frozen = True
            self.session = None
            self._queue = []
        self.tick_index += 1
        return out

    def run(self, ticks: int) -> List[Dict]:
        out: List[Dict] = []
        for _ in range(ticks):
            out.extend(self.tick())
        return out

    def run_until_done(self, max_ticks: int = 20000) -> Tuple[str, List[Dict]]:
        """Tick until the active session finishes, the chair falls, the
        engine errors, or the budget runs out."""
        out: List[Dict] = []
        for _ in range(max_ticks):
            events = self.tick()
            out.extend(events)
            for ev in events:
                if ev["t"] in ("done", "fall", "err"):
                    return (ev["t"] if ev["t"] != "err" else ev["code"], out)
        return ("timeout", out)

    # -- protocol ----------------------------------------------------------

    def handle_message(self, msg: Dict) -> List[Dict]:
        """Apply one inbound protocol message, returning immediate replies.
        Never raises: malformed or ill-timed input becomes an err reply."""
        try:
            return self._dispatch(msg)
        except (CtmError, PlantError) as err:
            return [{"t": "err", "code": err.code}]
        except (KeyError, TypeError, ValueError, AttributeError):
            return [{"t": "err", "code": "bad-message"}]

    def _dispatch(self, msg: Dict) -> List[Dict]:
        if not isinstance(msg, dict) or not isinstance(msg.get("t"), str):
            return [{"t": "err", "code": "bad-message"}]
        kind = msg["t"]
        if kind == "load_motion":
            if "name" in msg:
                motion = self.library.get(msg["name"])
                if motion is None:
                    return [{"t": "err", "code": "no-motion"}]
            elif "text" in msg:
                result = parse_motion(str(msg["text"]))
                if not result.ok:
                    return [
                        {
                            "t": "err",
                            "code": "parse",
                            "detail": [str(d) for d in result.diagnostics],
                        }
                    ]
                motion = result.spec
            else:
                return [{"t": "err", "code": "bad-message"}]
            self.load_motion(motion)
            return [{"t": "ok"}]
        if kind == "teach_start":
            self.teach_start()
            return [{"t": "ok"}]
        if kind == "set_u":
            value = msg["v"]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return [{"t": "err", "code": "bad-message"}]
            self.set_u(float(value))
            return []
        if kind == "advance":
            return [self.advance()]
        if kind == "repro_start":
            deltas = msg.get("deltas")
            loops = msg.get("loops", 1)
            thresholds = msg.get("thresholds")
            if thresholds is not None:
                motion = self._require_motion()
                thresholds = ThresholdSet(motion.name, tuple(float(v) for v in thresholds))
            self.repro_start(deltas, int(loops), thresholds)
            return [{"t": "ok"}]
        if kind == "compose":
            plan = [(str(e["motion"]), int(e.get("loops", 1))) for e in msg["plan"]]
            self.compose_start(plan)
            return [{"t": "ok"}]
        if kind == "balancer":
            if not isinstance(msg.get("on"), bool):
                return [{"t": "err", "code": "bad-message"}]
            self.set_balancer(msg["on"])
            return [{"t": "ok"}]
        if kind == "reset":
            seed = msg.get("seed")
            if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
                return [{"t": "err", "code": "bad-message"}]
            self.reset(seed)
            return [{"t": "ok"}]
        if kind == "subscribe":
            return [{"t": "ok"}]
        return [{"t": "err", "code": "unknown-type"}]


# ---------------------------------------------------------------------------
# Teach traces and replay


@dataclass(frozen=True)
class TraceStep:
    tick: int
    action: str  # "u" or "advance"
    value: float = 0.0


def load_trace(path: str) -> List[TraceStep]:
    steps: List[TraceStep] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "tick":
                continue
            tick = int(row[0])
            token = row[1].strip()
            if token.upper() == "ADVANCE":
                steps.append(TraceStep(tick, "advance"))
            else:
                steps.append(TraceStep(tick, "u", float(token)))
    if any(b.tick < a.tick for a, b in zip(steps, steps[1:])):
        raise LogError("trace", "trace ticks must not decrease")
    return steps


def save_trace(steps: Sequence[TraceStep], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "action"])
        for step in steps:
            writer.writerow([step.tick, "ADVANCE" if step.action == "advance" else repr(step.value)])


def run_teach_trace(
    runtime: Runtime, motion: MotionSpec, steps: Sequence[TraceStep]
) -> ThresholdSet:
    """Drive a recorded teaching pass at its original ticks."""
    runtime.load_motion(motion)
    runtime.teach_start()
    for step in steps:
        while runtime.tick_index < step.tick:
            runtime.tick()
        if step.action == "u":
            runtime.set_u(step.value)
        else:
            runtime.advance()
    taught = runtime.thresholds.get(motion.name)
    if taught is None or runtime.session is None or not runtime.session.complete:
        raise LogError("trace", "trace ended before the teaching pass finished")
    return taught


_INBOUND_KINDS = ("load", "teach_start", "slider", "advance", "repro_start", "compose", "balancer")


def replay_log(log: SessionLog) -> Runtime:
    """Rebuild a runtime by re-issuing a log's inbound events at their
    ticks, then ticking out to the log's final frame."""
    config = runtime_config_from_text(log.header["config"])
    runtime = Runtime(config, seed=log.header["seed"])
    last_frame_tick = max(
        (e["tick"] for e in log.events if e["kind"] == "frame"), default=-1
    )
    for event in log.events:
        if event["kind"] not in _INBOUND_KINDS:
            continue
        while runtime.tick_index < event["tick"]:
            runtime.tick()
        kind = event["kind"]
        if kind == "load":
            runtime.load_motion(load_motion_text(event["text"]))
        elif kind == "teach_start":
            runtime.teach_start()
        elif kind == "slider":
            runtime.set_u(event["v"])
        elif kind == "advance":
            runtime.advance()
        elif kind == "repro_start":
            thresholds = event["thresholds"]
            runtime.repro_start(
                event["deltas"],
                event["loops"],
                None
                if thresholds is None
                else ThresholdSet(runtime._require_motion().name, tuple(thresholds)),
            )
        elif kind == "compose":
            runtime.compose_start([(e["motion"], e["loops"]) for e in event["plan"]])
        elif kind == "balancer":
            runtime.set_balancer(event["on"])
    while runtime.tick_index <= last_frame_tick and not runtime.frozen:
        runtime.tick()
    return runtime
