"""Shared builders for the test suite."""

from __future__ import annotations

import json
import random
from importlib import resources
from typing import Dict, List, Optional, Tuple

import pytest

from seatwalk.ctm import (
    ConditionSpec,
    Direction,
    MotionSpec,
    StateSpec,
    ThresholdSet,
)
from seatwalk.joints import ControlTarget, JointId, target_joints
from seatwalk.plant import SensorFrame

FORCES = ("F_foot", "F_lfoot", "F_rfoot", "F_lhip", "F_rhip")


def frame(
    tick: int = 0,
    lfoot: float = 0.0,
    rfoot: float = 0.0,
    lhip: float = 0.0,
    rhip: float = 0.0,
    cmd: Optional[Dict[JointId, float]] = None,
    pose: Tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> SensorFrame:
    commanded = {j: 0.0 for j in JointId}
    if cmd:
        commanded.update(cmd)
    return SensorFrame(
        tick=tick,
        f_lfoot=lfoot,
        f_rfoot=rfoot,
        f_lhip=lhip,
        f_rhip=rhip,
        commanded=commanded,
        pose=pose,
    )


def published(name: str) -> ThresholdSet:
    data = json.loads(
        resources.files("seatwalk").joinpath(f"data/thresholds/{name}.json").read_text()
    )
    return ThresholdSet(data["motion"], tuple(float(v) for v in data["values"]))


def shipped_trace(name: str) -> str:
    return str(resources.files("seatwalk").joinpath(f"data/traces/teach_{name}.csv"))


def simple_motion(
    n_states: int = 2,
    sensor: str = "F_foot",
    direction: Direction = Direction.GEQ,
    threshold: Optional[float] = None,
    control: ControlTarget = ControlTarget.T_P,
    delta: float = 1.0,
    loopable: bool = True,
) -> MotionSpec:
    states = tuple(
        StateSpec(
            index=i + 1,
            control=control,
            condition=ConditionSpec(sensor, direction, threshold),
            delta=delta,
        )
        for i in range(n_states)
    )
    return MotionSpec("test_motion", {}, states, loopable)


def random_case(rng: random.Random):
    """One random reproduction scenario with its expected schedule.

    Builds the frame trace by walking the state chain: each tick flips a
    coin on whether the current state's condition holds, so the expected
    transition ticks are known independent of either interpreter.
    """
    n = rng.randint(2, 6)
    loops = rng.randint(1, 3)
    targets = list(ControlTarget)
    states = []
    for i in range(n):
        control = rng.choice(targets)
        if rng.random() < 0.3:
            sensor = rng.choice([j.value for j in target_joints(control)])
        else:
            sensor = rng.choice(FORCES)
        direction = rng.choice((Direction.LEQ, Direction.GEQ))
        fixed = rng.random() < 0.5
        threshold = round(rng.uniform(-40.0, 90.0), 2) if fixed else None
        states.append(
            StateSpec(
                index=i + 1,
                control=control,
                condition=ConditionSpec(sensor, direction, threshold),
                delta=rng.choice((-3.0, -2.0, -1.0, 1.0, 2.0, 3.0)),
            )
        )
    motion = MotionSpec("random_case", {}, tuple(states), loopable=True)
    learned = tuple(
        round(rng.uniform(-40.0, 90.0), 2) if st.condition.threshold is None else 0.0
        for st in states
    )
    thresholds = ThresholdSet(motion.name, learned)

    frames: List[SensorFrame] = []
    expected: List[int] = []
    index, passes, tick = 0, 0, 0
    while passes < loops and tick < 500:
        st = motion.states[index]
        thr = st.condition.threshold
        if thr is None:
            thr = thresholds.values[index]
        fire = rng.random() < 0.35
        margin = rng.uniform(0.01, 25.0)
        if st.condition.direction is Direction.GEQ:
            value = thr + (rng.uniform(0.0, margin) if fire else -margin)
        else:
            value = thr - (rng.uniform(0.0, margin) if fire else -margin)
        cmd = {j: round(rng.uniform(-100.0, 100.0), 1) for j in JointId}
        forces = {k: round(rng.uniform(-50.0, 120.0), 2) for k in FORCES}
        sensor = st.condition.sensor
        if sensor in FORCES:
            if sensor == "F_foot":
                forces["F_lfoot"] = value / 2.0
                forces["F_rfoot"] = value - value / 2.0
            else:
                forces[sensor] = value
        else:
            cmd[JointId(sensor)] = value
        frames.append(
            SensorFrame(
                tick=tick,
                f_lfoot=forces["F_lfoot"],
                f_rfoot=forces["F_rfoot"],
                f_lhip=forces["F_lhip"],
                f_rhip=forces["F_rhip"],
                commanded=cmd,
                pose=(0.0, 0.0, 0.0),
            )
        )
        if fire:
            expected.append(tick)
            index += 1
            if index == n:
                index = 0
                passes += 1
        tick += 1
    return motion, thresholds, frames, loops, expected


@pytest.fixture
def rng():
    return random.Random(20240817)
