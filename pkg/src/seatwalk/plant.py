"""Seated-chair plant: foot loading, stick-slip traction, buttock split.

The robot sits on a caster chair and walks it by planting its feet and
pulling.  This model keeps just enough physics for gait work:

* joint servos follow commands with a one-tick latch plus first-order lag;
* foot load grows as the torso and a leg pitch forward onto that foot;
* a loaded foot sticks when friction beats the casters' rolling
  resistance, which differs between pulling forward and pushing back;
* while a foot is stuck, changes in its forward reach translate the
  chair; if exactly one foot is stuck, hip-roll motion of that leg yaws
  the chair;
* the operator's weight splits across two buttock pressure sensors; foot
  drag slowly shifts the lean (drift), and a sustained one-sided split
  topples the chair.

Hip-mounted FSRs report through a log-compressing 10-bit ADC; the
exponential correction recovers a value proportional to force.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Tuple

from .joints import JointId, neutral_posture

# reach rate (m per tick) below which a foot is holding, not dragging;
# servo-settling creep must not flip a planted foot into sliding mode
MOVE_EPS = 1e-5
# consecutive over-ratio ticks before the chair goes over
FALL_TICKS = 5


class PlantError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# FSR codec


def fsr_forward(pressure: float, ref: float) -> int:
    """10-bit log ADC reading for a pressure, saturating at full scale."""
    p = max(0.0, pressure)
    return min(1023, round(100.0 * math.log(1.0 + p / ref)))


def fsr_correct(reading: float) -> float:
    """Invert the log compression: exp(A/100) for a raw count A."""
    if reading < 0 or reading > 1023:
        raise PlantError("fsr-range", f"ADC reading {reading!r} outside 0..1023")
    return math.exp(reading / 100.0)


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class PlantConfig:
    """Calibration constants.  Angles in degrees, forces in N, metres."""

    shank_length: float = 0.32  # hip-to-ankle lever for reach
    body_weight: float = 400.0  # operator plus robot, on seat when feet unloaded
    half_load: float = 20.0  # per-foot load in the neutral pose
    torso_pitch_gain: float = 2.5  # N of foot load per degree of T-p
    hip_pitch_gain: float = 2.5  # N per degree of same-side H-p
    friction: float = 0.8  # foot-floor friction coefficient
    roll_resist_fwd: float = 35.0  # caster resistance against pulling forward
    roll_resist_bwd: float = 4.0  # against pushing backward (with the casters)
    traction_fwd: float = 1.0  # chair travel per metre of reach change
    traction_bwd: float = 0.69
    rotation_ratio: float = 0.405  # chair yaw per degree of dragged hip roll
    hip_split_gain: float = 18.0  # buttock split per degree of lean error
    drift_step: float = 0.13  # lean accrued per tick of stuck-foot drag
    drift_noise: float = 0.02  # std dev of per-tick lean noise
    fall_ratio: float = 0.8  # |split| / available weight that topples
    joint_lag: float = 0.3  # servo first-order time constant, seconds
    fsr_ref: float = 50.0  # pressure giving ADC count 100*ln(2)

    def validate(self) -> None:
        positive = (
            "shank_length",
            "body_weight",
            "friction",
            "joint_lag",
            "fsr_ref",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise PlantError("config", f"{name} must be positive")
        nonnegative = (
            "half_load",
            "torso_pitch_gain",
            "hip_pitch_gain",
            "roll_resist_fwd",
            "roll_resist_bwd",
            "traction_fwd",
            "traction_bwd",
            "rotation_ratio",
            "hip_split_gain",
            "drift_step",
            "drift_noise",
        )
        for name in nonnegative:
            if getattr(self, name) < 0:
                raise PlantError("config", f"{name} must not be negative")
        if not 0.0 < self.fall_ratio <= 1.0:
            raise PlantError("config", "fall_ratio must be in (0, 1]")


def config_to_text(config: PlantConfig) -> str:
    lines = [f"{f.name}={getattr(config, f.name)!r}" for f in fields(PlantConfig)]
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> PlantConfig:
    known = {f.name for f in fields(PlantConfig)}
    config = PlantConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PlantError("config", f"line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise PlantError("config", f"line {lineno}: unknown key {key!r}")
        try:
            setattr(config, key, float(value.strip()))
        except ValueError:
            raise PlantError(
                "config", f"line {lineno}: bad number for {key!r}"
            ) from None
    config.validate()
    return config


# ---------------------------------------------------------------------------
# Forces and kinematics


def foot_load(
    t_p: float, lh_p: float, rh_p: float, config: PlantConfig
) -> Tuple[float, float]:
    """Per-foot floor force from torso pitch and each hip pitch, floored
    at zero: a lifted foot carries nothing."""
    left = config.half_load + config.torso_pitch_gain * t_p + config.hip_pitch_gain * lh_p
    right = config.half_load + config.torso_pitch_gain * t_p + config.hip_pitch_gain * rh_p
    return (max(0.0, left), max(0.0, right))


def forward_reach(knee_pitch: float, config: PlantConfig) -> float:
    """Horizontal ankle offset ahead of the hip; 90 deg (shank vertical)
    is zero reach, extension swings the foot forward."""
    return config.shank_length * math.cos(math.radians(knee_pitch))


def stick_test(normal_force: float, direction: str, config: PlantConfig) -> bool:
    """Does friction at this foot beat the casters for the given drag
    direction ("fwd" = pulling chair forward, "bwd" = pushing back)?"""
    if direction == "fwd":
        resist = config.roll_resist_fwd
    elif direction == "bwd":
        resist = config.roll_resist_bwd
    else:
        raise PlantError("direction", f"unknown drag direction {direction!r}")
    return normal_force > 0.0 and config.friction * normal_force >= resist


# ---------------------------------------------------------------------------
# Sensor frame


@dataclass(frozen=True)
class SensorFrame:
    """Everything the gait layer may condition on, for one tick."""

    tick: int
    f_lfoot: float  # N
    f_rfoot: float  # N
    f_lhip: float  # corrected FSR units
    f_rhip: float
    commanded: Dict[JointId, float]  # degrees, as last commanded
    pose: Tuple[float, float, float]  # x m, y m, yaw deg

    @property
    def f_foot(self) -> float:
        return self.f_lfoot + self.f_rfoot


# ---------------------------------------------------------------------------
# State and stepping


@dataclass
class PlantState:
    config: PlantConfig
    rng: random.Random
    actual: Dict[JointId, float]
    latched: Dict[JointId, float]
    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0
    drift: float = 0.0
    tick: int = 0
    fallen: bool = False
    fall_streak: int = 0
    stuck_l: bool = False
    stuck_r: bool = False
    anchor_l: Optional[float] = None  # reach where the foot stuck down
    anchor_r: Optional[float] = None
    prev_reach_l: float = 0.0
    prev_reach_r: float = 0.0
    prev_hr_l: float = 0.0
    prev_hr_r: float = 0.0
    last_split: Tuple[float, float] = (0.0, 0.0)  # raw buttock pressures


def reset_plant(config: PlantConfig, seed: int) -> PlantState:
    config.validate()
    pose = neutral_posture()
    state = PlantState(
        config=config,
        rng=random.Random(seed),
        actual=dict(pose),
        latched=dict(pose),
    )
    state.prev_reach_l = forward_reach(pose[JointId.LK_P], config)
    state.prev_reach_r = forward_reach(pose[JointId.RK_P], config)
    return state


def _foot_pass(
    reach: float, prev_reach: float, force: float, config: PlantConfig
) -> Tuple[bool, str, float]:
    """Stick verdict, drag direction, and chair travel for one foot."""
    dr = reach - prev_reach
    if dr < -MOVE_EPS:
        direction = "fwd"  # reach shrinking pulls a stuck chair forward
    elif dr > MOVE_EPS:
        direction = "bwd"
    else:
        direction = "bwd"  # holding still only fights the lower resistance
    stuck = stick_test(force, direction, config)
    if not stuck:
        return (False, direction, 0.0)
    eta = config.traction_fwd if dr < 0 else config.traction_bwd
    return (True, direction, -eta * dr)


def plant_step(
    state: PlantState, commands: Dict[JointId, float], dt: float
) -> SensorFrame:
    """Advance one control period and return the new sensor frame.

    Commands latch for one period before the servo lag integrates them:
    the frame a controller reacts to always reflects its previous output.
    """
    if state.fallen:
        raise PlantError("fallen", "plant has fallen; reset before stepping")
    config = state.config

    alpha = math.exp(-dt / config.joint_lag)
    for joint in JointId:
        target = state.latched[joint]
        state.actual[joint] += (1.0 - alpha) * (target - state.actual[joint])
    state.latched = {j: float(commands.get(j, 0.0)) for j in JointId}

    f_l, f_r = foot_load(
        state.actual[JointId.T_P],
        state.actual[JointId.LH_P],
        state.actual[JointId.RH_P],
        config,
    )

    reach_l = forward_reach(state.actual[JointId.LK_P], config)
    reach_r = forward_reach(state.actual[JointId.RK_P], config)
    stuck_l, _, travel_l = _foot_pass(reach_l, state.prev_reach_l, f_l, config)
    stuck_r, _, travel_r = _foot_pass(reach_r, state.prev_reach_r, f_r, config)

    state.anchor_l = state.prev_reach_l if (stuck_l and not state.stuck_l) else (
        state.anchor_l if stuck_l else None
    )
    state.anchor_r = state.prev_reach_r if (stuck_r and not state.stuck_r) else (
        state.anchor_r if stuck_r else None
    )

    if stuck_l and stuck_r:
        travel = 0.5 * (travel_l + travel_r)
    elif stuck_l:
        travel = travel_l
    elif stuck_r:
        travel = travel_r
    else:
        travel = 0.0
    heading = math.radians(state.yaw)
    state.x += travel * math.cos(heading)
    state.y += travel * math.sin(heading)

    hr_l = state.actual[JointId.LH_R]
    hr_r = state.actual[JointId.RH_R]
    if stuck_l != stuck_r:
        # one planted foot: hip roll drags the chair around it
        if stuck_l:
            state.yaw += -config.rotation_ratio * (hr_l - state.prev_hr_l)
        else:
            state.yaw += -config.rotation_ratio * (hr_r - state.prev_hr_r)

    moved = (stuck_l and abs(reach_l - state.prev_reach_l) > MOVE_EPS) or (
        stuck_r and abs(reach_r - state.prev_reach_r) > MOVE_EPS
    )
    if moved:
        state.drift += config.drift_step + state.rng.gauss(0.0, config.drift_noise)

    seat_total = max(0.0, config.body_weight - (f_l + f_r))
    split = config.hip_split_gain * (state.drift - state.actual[JointId.T_R])
    split = max(-seat_total, min(seat_total, split))
    p_l = 0.5 * (seat_total + split)
    p_r = 0.5 * (seat_total - split)
    state.last_split = (p_l, p_r)

    if seat_total > 0.0 and abs(split) > config.fall_ratio * seat_total:
        state.fall_streak += 1
        if state.fall_streak >= FALL_TICKS:
            state.fallen = True
    else:
        state.fall_streak = 0

    frame = SensorFrame(
        tick=state.tick,
        f_lfoot=f_l,
        f_rfoot=f_r,
        f_lhip=fsr_correct(fsr_forward(p_l, config.fsr_ref)),
        f_rhip=fsr_correct(fsr_forward(p_r, config.fsr_ref)),
        commanded={j: float(commands.get(j, 0.0)) for j in JointId},
        pose=(state.x, state.y, state.yaw),
    )

    state.stuck_l, state.stuck_r = stuck_l, stuck_r
    state.prev_reach_l, state.prev_reach_r = reach_l, reach_r
    state.prev_hr_l, state.prev_hr_r = hr_l, hr_r
    state.tick += 1
    return frame
