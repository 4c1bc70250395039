"""PI torso-roll balancer on the buttock pressure difference.

While the feet drag the chair, the operator's lean wanders; the balancer
counter-rolls the torso so the corrected left/right hip FSR difference
returns to zero.  It runs every tick in both teaching and reproduction
and owns the torso roll joint outright.

Translation gaits tolerate a stiffer integral than rotation gaits, where
the planted-foot geometry amplifies lean; hence two gain sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

P_GAIN = 5.0
I_GAIN_TRANSLATION = 0.3
I_GAIN_ROTATION = 0.03

# anti-windup bound on the integrated difference and output clamp, degrees
ACCUM_LIMIT = 2000.0
OUTPUT_LIMIT = 45.0


def select_gains(kind: str) -> Tuple[float, float]:
    """(P, I) gains for a motion kind ("translation" or "rotation")."""
    if kind == "translation":
        return (P_GAIN, I_GAIN_TRANSLATION)
    if kind == "rotation":
        return (P_GAIN, I_GAIN_ROTATION)
    raise ValueError(f"unknown motion kind {kind!r}")


def _clamp(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))


@dataclass
class BalancerState:
    pgain: float = P_GAIN
    igain: float = I_GAIN_TRANSLATION
    accum: float = 0.0
    enabled: bool = True

    def set_gains(self, pgain: float, igain: float) -> None:
        """Switch gain sets without an output jump: the integral term
        keeps its contribution by rescaling the accumulator."""
        if igain != 0.0 and self.igain != 0.0 and igain != self.igain:
            self.accum = _clamp(self.accum * (self.igain / igain), ACCUM_LIMIT)
        self.pgain = pgain
        self.igain = igain

    def reset(self) -> None:
        self.accum = 0.0


def balancer_step(state: BalancerState, f_lhip: float, f_rhip: float) -> float:
    """Torso roll command for one tick from the corrected hip FSR pair.

    Disabled, it is a transparent no-op commanding neutral: the
    accumulator holds so re-enabling resumes where it left off.
    """
    if not state.enabled:
        return 0.0
    diff = f_lhip - f_rhip
    state.accum = _clamp(state.accum + diff, ACCUM_LIMIT)
    return _clamp(state.pgain * diff + state.igain * state.accum, OUTPUT_LIMIT)
