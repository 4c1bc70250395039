"""Regenerate the shipped teaching traces and golden session logs.

Each trace scripts a human teaching pass: slider moves, settling waits
at sensor targets, then an advance.  Force-conditioned states settle to
their published threshold before the advance so the taught value matches
it; joint-conditioned states are exact by construction.  Run from the
repository root:

    python3 tools/gen_fixtures.py
"""

from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from seatwalk.dsl import builtin_motions
from seatwalk.runtime import (
    Runtime,
    TraceStep,
    run_teach_trace,
    save_log,
    save_trace,
)

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "seatwalk", "data", "traces")
GOLDEN = os.path.join(os.path.dirname(__file__), "..", "tests", "golden")

# (tick, slider value) or (tick, "ADVANCE"); paced like the published
# teaching sessions: 47 s forward, 42 s backward, 63 s rotations at 5 Hz.
PLANS = {
    "move_forward": [
        (5, -3.0), (10, -6.0), (15, -9.0), (20, -10.0), (55, "ADVANCE"),
        (60, 85.0), (70, 75.0), (80, 62.0), (90, 55.0), (100, 51.3), (115, "ADVANCE"),
        (120, -4.0), (130, 2.0), (140, 6.0), (150, 7.16), (215, "ADVANCE"),
        (220, 65.0), (227, 80.0), (232, 90.0), (235, "ADVANCE"),
    ],
    "move_backward": [
        (5, -4.0), (12, -8.0), (20, -10.0), (50, "ADVANCE"),
        (60, 90.0), (70, "ADVANCE"),
        (80, -4.0), (90, -6.5), (100, -6.74), (160, "ADVANCE"),
        (170, 70.0), (180, 55.0), (190, 46.8), (205, "ADVANCE"),
    ],
    "rotate_left": [
        (10, -4.0), (25, -8.0), (35, -10.0), (60, "ADVANCE"),
        (70, 8.0), (85, 16.0), (100, 24.0), (110, 30.4), (120, "ADVANCE"),
        (130, -8.5), (140, -7.232), (195, "ADVANCE"),
        (205, -5.0), (215, -10.0), (240, "ADVANCE"),
        (248, 20.0), (256, 10.0), (264, 4.0), (272, "ADVANCE"),
        (280, -5.904), (313, "ADVANCE"),
    ],
    "rotate_right": [
        (10, -4.0), (25, -8.0), (35, -10.0), (60, "ADVANCE"),
        (70, 8.0), (85, 16.0), (100, 24.0), (110, 30.4), (120, "ADVANCE"),
        (130, -8.5), (140, -7.232), (195, "ADVANCE"),
        (205, -5.0), (215, -10.0), (240, "ADVANCE"),
        (248, 20.0), (256, 10.0), (264, 4.0), (272, "ADVANCE"),
        (280, -5.904), (313, "ADVANCE"),
    ],
}

SEED = 7


def plan_steps(plan):
    steps = []
    for tick, action in plan:
        if action == "ADVANCE":
            steps.append(TraceStep(tick, "advance"))
        else:
            steps.append(TraceStep(tick, "u", float(action)))
    return steps


def main() -> None:
    motions = builtin_motions()
    for name, plan in PLANS.items():
        steps = plan_steps(plan)
        runtime = Runtime(seed=SEED)
        taught = run_teach_trace(runtime, motions[name], steps)
        save_trace(steps, os.path.join(DATA, f"teach_{name}.csv"))
        print(name, "->", [round(v, 6) for v in taught.values])
        if name in ("move_forward", "move_backward"):
            save_log(runtime.log, os.path.join(GOLDEN, f"teach_{name}.ndjson"))


if __name__ == "__main__":
    main()
