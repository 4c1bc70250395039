"""Teachable seated-walk gaits for a chair-mounted dual-leg robot."""

from .balancer import BalancerState, balancer_step, select_gains
from .ctm import (
    ConditionSpec,
    CtmEngine,
    CtmError,
    Direction,
    Mode,
    MotionSpec,
    StateSpec,
    ThresholdSet,
    TransitionRecord,
    evaluate_condition,
    motion_kind,
    reproduction_step,
    taught_thresholds,
    teach_advance,
    teach_set_command,
)
from .dsl import builtin_motions, load_motion_text, parse_motion, print_motion
from .joints import ControlTarget, JointId, apply_target, neutral_posture
from .oracle import transition_ticks
from .plant import (
    PlantConfig,
    PlantError,
    SensorFrame,
    foot_load,
    forward_reach,
    fsr_correct,
    fsr_forward,
    plant_step,
    reset_plant,
    stick_test,
)
from .runtime import (
    Runtime,
    RuntimeConfig,
    SessionLog,
    export_trajectory,
    load_log,
    replay_log,
    run_teach_trace,
    save_log,
)

__version__ = "0.1.0"
