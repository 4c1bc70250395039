"""Joint namespace and control-target mapping for the dual-leg chair robot.

Thirteen position-controlled joints: three in the torso mount and five per
leg (hip roll/pitch/yaw, knee pitch/yaw).  Angles are commanded degrees
throughout; the plant applies its own actuation lag, so "angle of a joint"
in gait logic always means the commanded value.

A control target maps the single gait command u onto one or more joints:
either one joint directly, both knee pitches together, or the two hip
rolls mirrored (left gets u, right gets -u).
"""

from __future__ import annotations

import enum
from typing import Dict

JOINT_LIMIT_DEG = 120.0


class JointId(enum.Enum):
    T_R = "T-r"
    T_P = "T-p"
    T_Y = "T-y"
    LH_R = "lH-r"
    LH_P = "lH-p"
    LH_Y = "lH-y"
    LK_P = "lK-p"
    LK_Y = "lK-y"
    RH_R = "rH-r"
    RH_P = "rH-p"
    RH_Y = "rH-y"
    RK_P = "rK-p"
    RK_Y = "rK-y"

    def __str__(self) -> str:
        return self.value


_BY_NAME = {j.value: j for j in JointId}


def joint_from_name(name: str) -> JointId:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown joint {name!r}") from None


def clamp_angle(deg: float) -> float:
    if deg > JOINT_LIMIT_DEG:
        return JOINT_LIMIT_DEG
    if deg < -JOINT_LIMIT_DEG:
        return -JOINT_LIMIT_DEG
    return deg


class ControlTarget(enum.Enum):
    """What the scalar gait command u drives in a given state."""

    T_R = "T-r"
    T_P = "T-p"
    T_Y = "T-y"
    LH_P = "lH-p"
    RH_P = "rH-p"
    LH_Y = "lH-y"
    RH_Y = "rH-y"
    LK_P = "lK-p"
    RK_P = "rK-p"
    LK_Y = "lK-y"
    RK_Y = "rK-y"
    KNEE_PAIR = "Kp-pair"
    HIP_ROLL_MIRROR = "Hr-mirror"

    def __str__(self) -> str:
        return self.value


_TARGET_BY_NAME = {t.value: t for t in ControlTarget}


def target_from_name(name: str) -> ControlTarget:
    try:
        return _TARGET_BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown control target {name!r}") from None


def target_joints(target: ControlTarget) -> tuple[JointId, ...]:
    """Joints written by a target, primary joint first."""
    if target is ControlTarget.KNEE_PAIR:
        return (JointId.LK_P, JointId.RK_P)
    if target is ControlTarget.HIP_ROLL_MIRROR:
        return (JointId.LH_R, JointId.RH_R)
    return (joint_from_name(target.value),)


def primary_joint(target: ControlTarget) -> JointId:
    return target_joints(target)[0]


def apply_target(target: ControlTarget, u: float) -> Dict[JointId, float]:
    """Expand command u into per-joint angle assignments.

    The mirror target negates the right hip roll so both legs swing the
    same way in the world frame.
    """
    u = clamp_angle(u)
    if target is ControlTarget.KNEE_PAIR:
        return {JointId.LK_P: u, JointId.RK_P: u}
    if target is ControlTarget.HIP_ROLL_MIRROR:
        return {JointId.LH_R: u, JointId.RH_R: -u}
    return {joint_from_name(target.value): u}


def neutral_posture() -> Dict[JointId, float]:
    """Seated rest pose: shanks vertical (knees at 90), everything else 0."""
    pose = {j: 0.0 for j in JointId}
    pose[JointId.LK_P] = 90.0
    pose[JointId.RK_P] = 90.0
    return pose
