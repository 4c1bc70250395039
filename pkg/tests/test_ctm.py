import math

import pytest

from conftest import frame, simple_motion
from seatwalk.ctm import (
    ConditionSpec,
    CtmEngine,
    CtmError,
    Direction,
    Mode,
    MotionSpec,
    StateSpec,
    ThresholdSet,
    evaluate_condition,
    motion_kind,
    reproduction_step,
    taught_thresholds,
    teach_advance,
    teach_set_command,
)
from seatwalk.dsl import builtin_motions
from seatwalk.joints import ControlTarget, JointId


def cond(sensor, direction, threshold=None):
    return ConditionSpec(sensor, direction, threshold)


# -- condition evaluation ----------------------------------------------------


def test_condition_leq_fires_at_zero_force():
    c = cond("F_foot", Direction.LEQ)
    assert evaluate_condition(c, 0.0, frame(lfoot=0.0, rfoot=0.0))
    assert not evaluate_condition(c, 0.0, frame(lfoot=0.5, rfoot=0.0))


def test_condition_geq_inclusive_on_commanded_angle():
    c = cond("lK-p", Direction.GEQ)
    at = frame(cmd={JointId.LK_P: 90.0})
    below = frame(cmd={JointId.LK_P: 89.999})
    assert evaluate_condition(c, 90.0, at)
    assert not evaluate_condition(c, 90.0, below)


def test_condition_foot_sum():
    c = cond("F_foot", Direction.GEQ)
    assert evaluate_condition(c, 75.8, frame(lfoot=40.0, rfoot=35.8))
    assert not evaluate_condition(c, 75.8, frame(lfoot=40.0, rfoot=35.7))


def test_condition_unknown_sensor():
    with pytest.raises(CtmError) as err:
        evaluate_condition(cond("F_nose", Direction.LEQ), 0.0, frame())
    assert err.value.code == "unknown-sensor"


# -- teaching ----------------------------------------------------------------


def test_begin_teaching_starts_at_state_one():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["move_forward"])
    assert session.mode is Mode.TEACH
    assert session.state_index == 1
    assert session.commands[JointId.LK_P] == 90.0
    assert session.u == 0.0  # state 1 drives T-p, initially 0


def test_begin_teaching_six_state_motion_expects_six_thresholds():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["rotate_left"])
    for i in range(6):
        assert not session.complete
        teach_advance(session, frame(tick=i))
    assert session.complete
    assert len(taught_thresholds(session).values) == 6


def test_new_session_invalidates_old():
    engine = CtmEngine()
    motion = builtin_motions()["move_forward"]
    old = engine.begin_teaching(motion)
    engine.begin_teaching(motion)
    with pytest.raises(CtmError) as err:
        teach_set_command(old, 1.0)
    assert err.value.code == "stale"


def test_teach_set_command_applies_target():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["move_forward"])
    assert teach_set_command(session, -4.0) == {JointId.T_P: -4.0}
    assert session.u == -4.0
    assert session.commands[JointId.T_P] == -4.0


def test_teach_set_command_clamps():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["move_forward"])
    teach_set_command(session, -500.0)
    assert session.u == -120.0


def test_teach_advance_records_sensor_value():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["move_forward"])
    record = teach_advance(session, frame(tick=9, lfoot=0.0, rfoot=0.0))
    assert record.state_index == 1
    assert record.value == 0.0
    assert record.tick == 9
    assert session.state_index == 2


def test_teach_advance_command_continuity_into_knee_pair():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["move_forward"])
    teach_advance(session, frame())
    # state 2 drives the knee pair; u picks up the commanded left knee
    assert session.state_index == 2
    assert session.u == 90.0


def test_teach_complete_then_advance_errors():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["move_forward"])
    for i in range(4):
        teach_advance(session, frame(tick=i))
    assert session.complete
    with pytest.raises(CtmError) as err:
        teach_advance(session, frame())
    assert err.value.code == "teach-complete"
    with pytest.raises(CtmError) as err2:
        teach_set_command(session, 0.0)
    assert err2.value.code == "teach-complete"


def test_taught_thresholds_in_chain_order():
    engine = CtmEngine()
    session = engine.begin_teaching(builtin_motions()["move_forward"])
    teach_advance(session, frame(lfoot=0.0))
    teach_set_command(session, 51.3)
    teach_advance(session, frame(cmd={JointId.LK_P: 51.3}))
    teach_advance(session, frame(lfoot=40.0, rfoot=35.8))
    teach_set_command(session, 90.0)
    teach_advance(session, frame(cmd={JointId.LK_P: 90.0}))
    assert taught_thresholds(session).values == (0.0, 51.3, 75.8, 90.0)


def test_wrong_mode_guards():
    engine = CtmEngine()
    motion = simple_motion(threshold=5.0)
    session = engine.begin_reproduction(motion, None, (1.0, 1.0))
    with pytest.raises(CtmError) as err:
        teach_set_command(session, 1.0)
    assert err.value.code == "wrong-mode"
    with pytest.raises(CtmError) as err2:
        teach_advance(session, frame())
    assert err2.value.code == "wrong-mode"
    teach = engine.begin_teaching(motion)
    with pytest.raises(CtmError) as err3:
        reproduction_step(teach, frame())
    assert err3.value.code == "wrong-mode"


# -- starting reproduction ---------------------------------------------------


def test_begin_reproduction_validates_delta_arity():
    engine = CtmEngine()
    with pytest.raises(CtmError) as err:
        engine.begin_reproduction(
            builtin_motions()["move_forward"],
            ThresholdSet("move_forward", (0.0, 51.3, 75.8, 90.0)),
            (1.0, 1.0),
        )
    assert err.value.code == "delta-arity"


def test_begin_reproduction_rejects_zero_delta():
    engine = CtmEngine()
    with pytest.raises(CtmError) as err:
        engine.begin_reproduction(simple_motion(threshold=1.0), None, (1.0, 0.0))
    assert err.value.code == "zero-delta"


def test_begin_reproduction_requires_thresholds_for_learned():
    engine = CtmEngine()
    with pytest.raises(CtmError) as err:
        engine.begin_reproduction(
            builtin_motions()["move_forward"], None, (1.0, 1.0, 1.0, 1.0)
        )
    assert err.value.code == "threshold-unlearned"


def test_begin_reproduction_fixed_thresholds_need_no_set():
    engine = CtmEngine()
    session = engine.begin_reproduction(simple_motion(threshold=5.0), None, (1.0, 1.0))
    assert session.mode is Mode.REPRODUCE


def test_multi_loop_needs_loopable():
    engine = CtmEngine()
    motion = simple_motion(threshold=5.0, loopable=False)
    with pytest.raises(CtmError) as err:
        engine.begin_reproduction(motion, None, (1.0, 1.0), loops=2)
    assert err.value.code == "not-loopable"


# -- reproduction stepping ---------------------------------------------------


def fwd_session(engine=None, loops=1):
    engine = engine or CtmEngine()
    return engine.begin_reproduction(
        builtin_motions()["move_forward"],
        ThresholdSet("move_forward", (0.0, 51.3, 75.8, 90.0)),
        (-2.0, -3.0, 2.0, 1.0),
        loops,
    )


def test_step_increments_u_when_condition_false():
    session = fwd_session()
    out = reproduction_step(session, frame(lfoot=20.0, rfoot=20.0))
    assert out.transition is None
    assert out.assignments == {JointId.T_P: -2.0}
    assert session.u == -2.0


def test_step_transitions_without_command_change():
    session = fwd_session()
    out = reproduction_step(session, frame(tick=3, lfoot=0.0, rfoot=0.0))
    assert out.assignments == {}
    assert out.transition is not None
    assert out.transition.state_index == 1
    assert out.transition.value == 0.0
    assert session.state_index == 2
    assert session.u == 90.0  # continuity from the commanded knees


def test_always_true_conditions_finish_in_state_count_ticks():
    engine = CtmEngine()
    motion = simple_motion(n_states=4, direction=Direction.LEQ, threshold=1000.0)
    session = engine.begin_reproduction(motion, None, (1.0, 1.0, 1.0, 1.0))
    ticks = 0
    while not session.done:
        out = reproduction_step(session, frame(tick=ticks))
        ticks += 1
    assert ticks == 4
    assert out.done


def test_done_session_refuses_steps():
    engine = CtmEngine()
    session = engine.begin_reproduction(
        simple_motion(n_states=1, direction=Direction.LEQ, threshold=10.0), None, (1.0,)
    )
    reproduction_step(session, frame())
    with pytest.raises(CtmError) as err:
        reproduction_step(session, frame())
    assert err.value.code == "done"


def test_loops_wrap_to_state_one():
    session = fwd_session(loops=2)
    # drive all four states to fire immediately twice
    fire = [
        frame(lfoot=0.0),
        frame(cmd={JointId.LK_P: 40.0}),
        frame(lfoot=50.0, rfoot=50.0),
        frame(cmd={JointId.LK_P: 95.0}),
    ]
    transitions = 0
    for _ in range(2):
        for f in fire:
            out = reproduction_step(session, f)
            assert out.transition is not None
            transitions += 1
    assert transitions == 8
    assert session.done
    assert session.loops_done == 2


def test_overshoot_bounded_by_delta():
    """The frame lags the command by one tick, so u passes a
    joint-sensor threshold by at most one delta."""
    engine = CtmEngine()
    states = (
        StateSpec(1, ControlTarget.T_P, cond("T-p", Direction.GEQ, 10.0), 3.0),
        StateSpec(2, ControlTarget.T_P, cond("T-p", Direction.LEQ, -100.0), -1.0),
    )
    session = engine.begin_reproduction(MotionSpec("m", {}, states), None, (3.0, -1.0))
    fr = frame()
    while session.state_index == 1:
        out = reproduction_step(session, fr)
        fr = frame(cmd=dict(session.commands))
    assert session.commands[JointId.T_P] - 10.0 <= 3.0


def test_stall_when_pinned_at_limit():
    engine = CtmEngine()
    motion = simple_motion(
        n_states=1, sensor="F_foot", direction=Direction.GEQ, threshold=1e9, delta=50.0
    )
    session = engine.begin_reproduction(motion, None, (50.0,))
    with pytest.raises(CtmError) as err:
        for i in range(10000):
            reproduction_step(session, frame(tick=i))
    assert err.value.code == "stall"
    assert session.u == 120.0


def test_termination_bound_for_self_sensing_states(rng):
    """A state whose condition reads its own commanded joint fires in
    ceil(|C - u0| / |delta|) + 1 ticks."""
    for _ in range(50):
        u0 = rng.randint(-50, 50)
        delta = rng.choice((1, 2, 3, 5))
        gap = rng.randint(1, 115 - u0)  # stay clear of the joint limit
        c = u0 + gap
        engine = CtmEngine()
        states = (
            StateSpec(1, ControlTarget.T_P, cond("T-p", Direction.GEQ, float(c)), float(delta)),
        )
        motion = MotionSpec("m", {JointId.T_P: float(u0)}, states)
        session = engine.begin_reproduction(motion, None, (float(delta),))
        fr = frame(cmd={JointId.T_P: float(u0)})
        ticks = 0
        while not session.done:
            reproduction_step(session, fr)
            fr = frame(cmd=dict(session.commands))
            ticks += 1
        assert ticks == math.ceil(gap / delta) + 1


def test_progression_is_monotone(rng):
    """Within a pass the state index never decreases; across the wrap it
    returns to 1 exactly at a loop boundary."""
    session = fwd_session(loops=3)
    seen = [session.state_index]
    while not session.done:
        fire = rng.random() < 0.4
        i = session.state_index
        sensors = {
            1: frame(lfoot=0.0 if fire else 10.0),
            2: frame(cmd={JointId.LK_P: 40.0 if fire else 80.0}),
            3: frame(lfoot=60.0 if fire else 0.0, rfoot=60.0 if fire else 0.0),
            4: frame(cmd={JointId.LK_P: 95.0 if fire else 50.0}),
        }
        reproduction_step(session, sensors[i])
        seen.append(session.state_index)
    for a, b in zip(seen, seen[1:]):
        assert b == a or b == a + 1 or (a == 4 and b == 1)


def test_motion_kind():
    motions = builtin_motions()
    assert motion_kind(motions["move_forward"]) == "translation"
    assert motion_kind(motions["move_backward"]) == "translation"
    assert motion_kind(motions["rotate_left"]) == "rotation"
    assert motion_kind(motions["rotate_right"]) == "rotation"
