"""Reference interpreter for reproduction schedules.

Given a motion, thresholds, and a fixed sensor-frame trace, computes the
tick indices at which each state's condition first holds, walking the
chain the same way reproduction does but without commands, deltas applied
to a plant, or any engine state.  Kept deliberately separate from the
engine: the comparisons below are written out rather than shared, so the
two routes can disagree when one of them is wrong.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from .ctm import MotionSpec, ThresholdSet


def _read(frame, sensor: str) -> float:
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
    raise KeyError(sensor)


def transition_ticks(
    motion: MotionSpec,
    thresholds: Optional[ThresholdSet],
    frames: Sequence,
    loops: int = 1,
) -> List[int]:
    """Indices into `frames` at which state transitions fire.

    A tick fires at most one transition; the next state is first examined
    on the following tick.  Stops after `loops` complete passes or at the
    end of the trace, whichever comes first.
    """
    out: List[int] = []
    index = 0  # 0-based into motion.states
    passes = 0
    for tick, frame in enumerate(frames):
        state = motion.states[index]
        cond = state.condition
        if cond.threshold is not None:
            limit = float(cond.threshold)
        else:
            assert thresholds is not None
            limit = thresholds.values[index]
        value = _read(frame, cond.sensor)
        fired = value <= limit if cond.direction.value == "<=" else value >= limit
        if not fired:
            continue
        out.append(tick)
        index += 1
        if index == len(motion.states):
            index = 0
            passes += 1
            if passes >= loops:
                break
    return out
