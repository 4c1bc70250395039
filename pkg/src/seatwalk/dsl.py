"""Line-oriented text format for gait motions.

    # seated forward walk
    motion move_forward loop
    init lK-p=90 rK-p=90
    state 1: control T-p ; cond F_foot <= ? ; delta -2

One directive per line; `#` starts a comment.  A `?` threshold is filled
in by teaching; a number is fixed.  Parsing never throws on bad input:
it returns whatever spec it could build plus positioned diagnostics, so
an editor can show all problems at once.

A joint-angle condition must read a joint its own state actually drives
(directly, or via the pair/mirror group); waiting on a joint nothing is
moving would hang reproduction.  Force conditions are always allowed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .ctm import ConditionSpec, Direction, MotionSpec, StateSpec, FORCE_SENSORS
from .joints import JointId, target_from_name, target_joints

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TOKEN_RE = re.compile(r"[^\s;]+|;")
_STATE_NO_RE = re.compile(r"^(\d+):$")

_JOINT_NAMES = {j.value for j in JointId}
_SENSOR_NAMES = set(FORCE_SENSORS) | _JOINT_NAMES


@dataclass(frozen=True)
class Diagnostic:
    line: int  # 1-based
    col: int  # 1-based
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


@dataclass
class MotionSource:
    """Outcome of a parse: a spec when clean, diagnostics otherwise."""

    spec: Optional[MotionSpec]
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics and self.spec is not None


class MotionParseError(Exception):
    def __init__(self, diagnostics: List[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics) or "empty motion")
        self.diagnostics = diagnostics


class _LineParser:
    def __init__(self, lineno: int, line: str, out: List[Diagnostic]):
        self.lineno = lineno
        self.line = line
        self.out = out
        self.tokens: List[Tuple[str, int]] = [
            (m.group(), m.start() + 1) for m in _TOKEN_RE.finditer(line)
        ]
        self.pos = 0

    def error(self, col: int, message: str) -> None:
        self.out.append(Diagnostic(self.lineno, col, message))

    def peek(self) -> Optional[Tuple[str, int]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expect: str) -> Optional[Tuple[str, int]]:
        tok = self.peek()
        if tok is None:
            self.error(len(self.line) + 1, f"expected {expect}")
            return None
        self.pos += 1
        return tok

    def take_literal(self, literal: str) -> bool:
        tok = self.take(f"'{literal}'")
        if tok is None:
            return False
        if tok[0] != literal:
            self.error(tok[1], f"expected '{literal}', got {tok[0]!r}")
            return False
        return True

    def take_number(self, what: str) -> Optional[Tuple[float, int]]:
        tok = self.take(what)
        if tok is None:
            return None
        try:
            return (float(tok[0]), tok[1])
        except ValueError:
            self.error(tok[1], f"{what} must be a number, got {tok[0]!r}")
            return None

    def finish(self) -> None:
        tok = self.peek()
        if tok is not None:
            self.error(tok[1], f"unexpected trailing {tok[0]!r}")


def _parse_header(p: _LineParser) -> Optional[Tuple[str, bool]]:
    p.take_literal("motion")
    tok = p.take("motion name")
    if tok is None:
        return None
    name, col = tok
    if not _NAME_RE.match(name):
        p.error(col, f"bad motion name {name!r}")
        return None
    loopable = False
    nxt = p.peek()
    if nxt is not None and nxt[0] == "loop":
        loopable = True
        p.pos += 1
    p.finish()
    return (name, loopable)


def _parse_init(p: _LineParser) -> Dict[JointId, float]:
    p.take_literal("init")
    posture: Dict[JointId, float] = {}
    while p.peek() is not None:
        tok, col = p.take("joint=angle pair")  # type: ignore[misc]
        name, eq, value = tok.partition("=")
        if not eq:
            p.error(col, f"expected joint=angle, got {tok!r}")
            continue
        if name not in _JOINT_NAMES:
            p.error(col, f"unknown joint {name!r}")
            continue
        joint = JointId(name)
        if joint in posture:
            p.error(col, f"duplicate init for {name}")
            continue
        try:
            posture[joint] = float(value)
        except ValueError:
            p.error(col + len(name) + 1, f"bad angle {value!r} for {name}")
    return posture


def _parse_state(p: _LineParser) -> Optional[StateSpec]:
    p.take_literal("state")
    tok = p.take("state number")
    if tok is None:
        return None
    m = _STATE_NO_RE.match(tok[0])
    if not m:
        p.error(tok[1], f"expected '<n>:', got {tok[0]!r}")
        return None
    index = int(m.group(1))

    if not p.take_literal("control"):
        return None
    tok = p.take("control target")
    if tok is None:
        return None
    try:
        control = target_from_name(tok[0])
    except KeyError:
        p.error(tok[1], f"unknown control target {tok[0]!r}")
        return None

    if not p.take_literal(";"):
        return None
    if not p.take_literal("cond"):
        return None
    tok = p.take("sensor name")
    if tok is None:
        return None
    sensor, sensor_col = tok
    if sensor not in _SENSOR_NAMES:
        p.error(sensor_col, f"unknown sensor {sensor!r}")
        return None
    tok = p.take("comparison")
    if tok is None:
        return None
    if tok[0] == "<=":
        direction = Direction.LEQ
    elif tok[0] == ">=":
        direction = Direction.GEQ
    else:
        p.error(tok[1], f"expected '<=' or '>=', got {tok[0]!r}")
        return None
    tok = p.take("threshold")
    if tok is None:
        return None
    threshold: Optional[float]
    if tok[0] == "?":
        threshold = None
    else:
        try:
            threshold = float(tok[0])
        except ValueError:
            p.error(tok[1], f"threshold must be a number or '?', got {tok[0]!r}")
            return None

    if not p.take_literal(";"):
        return None
    if not p.take_literal("delta"):
        return None
    num = p.take_number("delta")
    if num is None:
        return None
    delta, delta_col = num
    if delta == 0:
        p.error(delta_col, "delta must be nonzero")
        return None
    p.finish()

    if sensor in _JOINT_NAMES:
        written = {j.value for j in target_joints(control)}
        if sensor not in written:
            p.error(
                sensor_col,
                f"condition reads {sensor} but state {index} only drives "
                + "/".join(sorted(written)),
            )
            return None

    return StateSpec(
        index=index,
        control=control,
        condition=ConditionSpec(sensor, direction, threshold),
        delta=delta,
    )


def parse_motion(text: str) -> MotionSource:
    diagnostics: List[Diagnostic] = []
    name: Optional[str] = None
    loopable = False
    posture: Dict[JointId, float] = {}
    states: List[StateSpec] = []
    seen_init = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        p = _LineParser(lineno, line, diagnostics)
        head = p.peek()
        assert head is not None
        keyword = head[0]
        if keyword == "motion":
            if name is not None:
                p.error(head[1], "duplicate motion header")
                continue
            parsed = _parse_header(p)
            if parsed is not None:
                name, loopable = parsed
        elif keyword == "init":
            if name is None:
                p.error(head[1], "init before motion header")
            if seen_init:
                p.error(head[1], "duplicate init line")
                continue
            seen_init = True
            posture = _parse_init(p)
        elif keyword == "state":
            if name is None:
                p.error(head[1], "state before motion header")
            state = _parse_state(p)
            if state is not None:
                expected = len(states) + 1
                if state.index != expected:
                    p.error(head[1], f"expected state {expected}, got {state.index}")
                else:
                    states.append(state)
        else:
            p.error(head[1], f"unknown directive {keyword!r}")

    if name is None:
        diagnostics.append(Diagnostic(1, 1, "missing motion header"))
    if not states:
        diagnostics.append(Diagnostic(1, 1, "motion has no states"))
    if diagnostics:
        return MotionSource(None, diagnostics)
    return MotionSource(
        MotionSpec(
            name=name,
            initial_posture=posture,
            states=tuple(states),
            loopable=loopable,
        )
    )


def load_motion_text(text: str) -> MotionSpec:
    """Parse, raising with all diagnostics if the text is not clean."""
    result = parse_motion(text)
    if not result.ok:
        raise MotionParseError(result.diagnostics)
    assert result.spec is not None
    return result.spec


def print_motion(motion: MotionSpec) -> str:
    """Canonical text form; printing then parsing returns an equal spec."""
    lines = [f"motion {motion.name} loop" if motion.loopable else f"motion {motion.name}"]
    if motion.initial_posture:
        pairs = [
            f"{j.value}={motion.initial_posture[j]!r}"
            for j in JointId
            if j in motion.initial_posture
        ]
        lines.append("init " + " ".join(pairs))
    for st in motion.states:
        thr = "?" if st.condition.threshold is None else repr(st.condition.threshold)
        lines.append(
            f"state {st.index}: control {st.control.value} ; "
            f"cond {st.condition.sensor} {st.condition.direction.value} {thr} ; "
            f"delta {st.delta!r}"
        )
    return "\n".join(lines) + "\n"


_BUILTIN_NAMES = ("move_forward", "move_backward", "rotate_left", "rotate_right")


def builtin_motions() -> Dict[str, MotionSpec]:
    """The four shipped gaits, parsed from package data."""
    out: Dict[str, MotionSpec] = {}
    for name in _BUILTIN_NAMES:
        text = (
            resources.files("seatwalk").joinpath(f"data/{name}.motion").read_text()
        )
        out[name] = load_motion_text(text)
    return out
