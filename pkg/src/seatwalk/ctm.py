"""Constrained teaching engine for seated-walk gaits.

A gait is a cyclic chain of states.  Each state constrains the robot to a
single scalar command u driving one control target, and owns a stop
condition: one sensor compared against one threshold.  Teaching walks the
chain once with a human driving u and registers, at each advance, the
current sensor value as that state's threshold.  Reproduction walks the
same chain autonomously, nudging u by a fixed per-state delta each tick
until the condition holds, then moving on.

Reproduction progress depends only on the sensor stream and the deltas;
how long the human took to teach never enters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .joints import (
    ControlTarget,
    JointId,
    apply_target,
    clamp_angle,
    primary_joint,
)

# Ticks a state may sit with u pinned at a joint limit before the engine
# gives up waiting for its condition.
STALL_LIMIT = 200

FORCE_SENSORS = ("F_foot", "F_lfoot", "F_rfoot", "F_lhip", "F_rhip")


class CtmError(Exception):
    """Engine fault with a stable machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class Mode(enum.Enum):
    TEACH = "teach"
    REPRODUCE = "reproduce"


class Direction(enum.Enum):
    LEQ = "<="
    GEQ = ">="

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ConditionSpec:
    """Stop test for one state: sensor vs threshold.

    threshold None means "learned": the value comes from teaching.  A
    fixed number bypasses the taught set for that state.
    """

    sensor: str
    direction: Direction
    threshold: Optional[float] = None

    @property
    def learned(self) -> bool:
        return self.threshold is None


@dataclass(frozen=True)
class StateSpec:
    index: int  # 1-based position in the chain
    control: ControlTarget
    condition: ConditionSpec
    delta: float  # default per-tick command increment for reproduction


@dataclass(frozen=True)
class MotionSpec:
    name: str
    initial_posture: Dict[JointId, float]
    states: Tuple[StateSpec, ...]
    loopable: bool = False

    @property
    def state_count(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class ThresholdSet:
    """One taught (or published) threshold per state, in chain order."""

    motion: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class TransitionRecord:
    state_index: int  # state that just finished
    value: float  # threshold registered (teach) or matched (reproduce)
    tick: int  # tick of the frame that triggered it


@dataclass
class StepResult:
    assignments: Dict[JointId, float] = field(default_factory=dict)
    transition: Optional[TransitionRecord] = None
    done: bool = False


def motion_kind(motion: MotionSpec) -> str:
    """"rotation" when any state swings the mirrored hip rolls, else
    "translation".  Decides which balancer gain set applies."""
    for st in motion.states:
        if st.control is ControlTarget.HIP_ROLL_MIRROR:
            return "rotation"
    return "translation"


def sensor_value(frame, sensor: str) -> float:
    """Read one sensor from a frame.

    Joint sensors report the commanded angle, not the lagged actual one;
    thresholds taught on commands must replay against commands.
    """
    if sensor == "F_foot":
        return frame.f_lfoot + frame.f_rfoot
    if sensor == "F_lfoot":
        return frame.f_lfoot
    if sensor == "F_rfoot":
        return frame.f_rfoot
    if sensor == "F_lhip":
        return frame.f_lhip
    if sensor == "F_rhip":
        return frame.f_rhip
    for joint, angle in frame.commanded.items():
        if joint.value == sensor:
            return angle
    raise CtmError("unknown-sensor", f"no sensor named {sensor!r}")


def evaluate_condition(condition: ConditionSpec, threshold: float, frame) -> bool:
    """Inclusive comparison so a threshold taught at an exact sensor value
    fires when that value recurs."""
    value = sensor_value(frame, condition.sensor)
    if condition.direction is Direction.LEQ:
        return value <= threshold
    return value >= threshold


class CtmSession:
    """One teaching or reproduction pass.  Created via CtmEngine only."""

    def __init__(self, motion: MotionSpec, mode: Mode):
        self.motion = motion
        self.mode = mode
        self.state_index = 1
        self.commands: Dict[JointId, float] = {j: 0.0 for j in JointId}
        self.commands.update(motion.initial_posture)
        self.u = self.commands[primary_joint(motion.states[0].control)]
        self.done = False
        self.invalidated = False
        # teaching
        self.recorded: List[float] = []
        self.records: List[TransitionRecord] = []
        self.complete = False
        # reproduction
        self.deltas: Tuple[float, ...] = ()
        self.thresholds: Optional[ThresholdSet] = None
        self.target_loops = 1
        self.loops_done = 0
        self._stall = 0

    # -- internals ---------------------------------------------------------

    def _state(self) -> StateSpec:
        return self.motion.states[self.state_index - 1]

    def _check_live(self) -> None:
        if self.invalidated:
            raise CtmError("stale", "session was superseded by a newer one")

    def _resolved_threshold(self, state: StateSpec) -> float:
        if not state.condition.learned:
            return float(state.condition.threshold)
        assert self.thresholds is not None
        return self.thresholds.values[state.index - 1]

    def _enter_state(self, index: int) -> None:
        """Command continuity: u picks up whatever the new target's primary
        joint is already commanded to, so no assignment jump occurs."""
        self.state_index = index
        self.u = self.commands[primary_joint(self._state().control)]
        self._stall = 0

    def _apply_u(self, u: float) -> Dict[JointId, float]:
        self.u = clamp_angle(u)
        assignments = apply_target(self._state().control, self.u)
        self.commands.update(assignments)
        return assignments


class CtmEngine:
    """Holds the single active session; starting a new one supersedes and
    invalidates the old."""

    def __init__(self) -> None:
        self.session: Optional[CtmSession] = None

    def _install(self, session: CtmSession) -> CtmSession:
        if self.session is not None:
            self.session.invalidated = True
        self.session = session
        return session

    def begin_teaching(self, motion: MotionSpec) -> CtmSession:
        if not motion.states:
            raise CtmError("no-states", f"motion {motion.name!r} has no states")
        return self._install(CtmSession(motion, Mode.TEACH))

    def begin_reproduction(
        self,
        motion: MotionSpec,
        thresholds: Optional[ThresholdSet],
        deltas: Tuple[float, ...],
        loops: int = 1,
    ) -> CtmSession:
        if not motion.states:
            raise CtmError("no-states", f"motion {motion.name!r} has no states")
        if len(deltas) != motion.state_count:
            raise CtmError(
                "delta-arity",
                f"{motion.state_count} states but {len(deltas)} deltas",
            )
        if any(d == 0 for d in deltas):
            raise CtmError("zero-delta", "a zero delta can never move u")
        if loops < 1:
            raise CtmError("bad-loops", "loops must be at least 1")
        if loops > 1 and not motion.loopable:
            raise CtmError(
                "not-loopable", f"motion {motion.name!r} is a single-pass motion"
            )
        for st in motion.states:
            if st.condition.learned and (
                thresholds is None or len(thresholds.values) != motion.state_count
            ):
                raise CtmError(
                    "threshold-unlearned",
                    f"state {st.index} needs a taught threshold",
                )
        session = self._install(CtmSession(motion, Mode.REPRODUCE))
        session.deltas = tuple(float(d) for d in deltas)
        session.thresholds = thresholds
        session.target_loops = loops
        return session


def teach_set_command(session: CtmSession, u: float) -> Dict[JointId, float]:
    """Apply the human's slider value to the current state's target."""
    session._check_live()
    if session.mode is not Mode.TEACH:
        raise CtmError("wrong-mode", "set-command only applies while teaching")
    if session.complete:
        raise CtmError("teach-complete", "teaching pass already finished")
    return session._apply_u(u)


def teach_advance(session: CtmSession, frame) -> TransitionRecord:
    """Register the current sensor value as this state's threshold and move
    to the next state (or finish the pass)."""
    session._check_live()
    if session.mode is not Mode.TEACH:
        raise CtmError("wrong-mode", "advance only applies while teaching")
    if session.complete:
        raise CtmError("teach-complete", "teaching pass already finished")
    state = session._state()
    value = sensor_value(frame, state.condition.sensor)
    record = TransitionRecord(state.index, value, frame.tick)
    session.recorded.append(value)
    session.records.append(record)
    if state.index == session.motion.state_count:
        session.complete = True
        session.done = True
    else:
        session._enter_state(state.index + 1)
    return record


def taught_thresholds(session: CtmSession) -> ThresholdSet:
    if not session.complete:
        raise CtmError("teach-incomplete", "teaching pass has not finished")
    return ThresholdSet(session.motion.name, tuple(session.recorded))


def reproduction_step(session: CtmSession, frame) -> StepResult:
    """Advance reproduction by one tick against the latest sensor frame.

    Checks the stop condition first, then increments: the frame reflects
    last tick's command, so u overshoots a satisfied condition by at most
    one delta.  A transition tick changes no commands; continuity gives
    the next state its starting u for the following tick.
    """
    session._check_live()
    if session.mode is not Mode.REPRODUCE:
        raise CtmError("wrong-mode", "step only applies while reproducing")
    if session.done:
        raise CtmError("done", "reproduction already finished")

    state = session._state()
    threshold = session._resolved_threshold(state)
    if evaluate_condition(state.condition, threshold, frame):
        record = TransitionRecord(state.index, threshold, frame.tick)
        if state.index == session.motion.state_count:
            session.loops_done += 1
            if session.loops_done >= session.target_loops:
                session.done = True
                return StepResult(transition=record, done=True)
            session._enter_state(1)
        else:
            session._enter_state(state.index + 1)
        return StepResult(transition=record)

    delta = session.deltas[state.index - 1]
    proposed = clamp_angle(session.u + delta)
    if proposed == session.u:
        # pinned at a joint limit with the condition still false
        session._stall += 1
        if session._stall > STALL_LIMIT:
            raise CtmError(
                "stall",
                f"state {state.index} stuck at joint limit for {STALL_LIMIT} ticks",
            )
        return StepResult()
    session._stall = 0
    return StepResult(assignments=session._apply_u(proposed))
