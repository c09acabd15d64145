"""Translation gain: the attention-driven controller and the fixed control profiles."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .attention import FRAME_DT, AttentionParams, AttentionState
from .errors import ConfigError, InvalidGainError, ParameterError

__all__ = [
    "Phase",
    "GainProfileMode",
    "GainController",
    "controller_step",
    "scheduled_gain",
    "apply_translation_gain",
    "physical_from_virtual",
    "ASCENT_DURATION",
    "HOLD_DURATION",
    "DESCENT_DURATION",
]

ASCENT_DURATION = 0.200
HOLD_DURATION = 0.300
DESCENT_DURATION = 0.050

# slack for comparing accumulated frame times against phase boundaries
_TIME_EPS = 1e-9


class Phase(enum.Enum):
    IDLE = "idle"
    ASCENT = "ascent"
    HOLD = "hold"
    DESCENT = "descent"


class GainProfileMode(enum.Enum):
    """How gain moves once the trigger fires.

    DYNAMIC follows the attention controller, SCHEDULED replays the
    canonical 550 ms envelope on a clock, SWITCH jumps straight to the target.
    """

    DYNAMIC = "dynamic"
    SCHEDULED = "scheduled"
    SWITCH = "switch"


@dataclass(frozen=True)
class GainController:
    """Phase machine for one dynamic-gain episode.

    ``t1_elapsed`` counts Ascent time and freezes once the ceiling is hit,
    at which point ``reached_max`` becomes true.
    """

    base_gain: float = 1.0
    target_gain: float = 1.0
    phase: Phase = Phase.IDLE
    current_gain: float | None = None
    phase_timer: float = 0.0
    t1_elapsed: float = 0.0
    reached_max: bool = False
    hold_duration: float = HOLD_DURATION
    descent_duration: float = DESCENT_DURATION

    def __post_init__(self):
        if not (self.base_gain > 0 and self.target_gain > 0):
            raise InvalidGainError(f"gains must be positive: {self.base_gain}, {self.target_gain}")
        if self.hold_duration < 0 or self.descent_duration <= 0:
            raise ParameterError("hold_duration must be >= 0 and descent_duration > 0")
        if self.current_gain is None:
            object.__setattr__(self, "current_gain", self.base_gain)

    @property
    def t1(self) -> float | None:
        """Ascent duration if the ceiling was reached, else None."""
        return self.t1_elapsed if self.reached_max else None


def controller_step(
    ctrl: GainController,
    state: AttentionState,
    dt: float = FRAME_DT,
    params: AttentionParams = AttentionParams(),
    trigger: bool = False,
) -> GainController:
    """Advance the controller by one frame given the post-step attention.

    ``trigger`` only matters in IDLE: the controller enters ASCENT and
    processes the same frame as its first Ascent frame.  After DESCENT the
    controller idles at the base gain until triggered again.
    """
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    base, target = ctrl.base_gain, ctrl.target_gain

    if ctrl.phase is Phase.IDLE:
        if not trigger:
            return replace(ctrl, current_gain=base)
        ctrl = replace(ctrl, phase=Phase.ASCENT, t1_elapsed=0.0, phase_timer=0.0, reached_max=False)

    if ctrl.phase is Phase.ASCENT:
        t1 = ctrl.t1_elapsed + dt
        frac = min(1.0, state.attention / params.a_max)
        if state.attention >= params.a_max:
            return replace(ctrl, phase=Phase.HOLD, phase_timer=0.0, t1_elapsed=t1,
                           current_gain=target, reached_max=True)
        return replace(ctrl, t1_elapsed=t1, current_gain=base + (target - base) * frac)

    timer = ctrl.phase_timer + dt
    if ctrl.phase is Phase.HOLD:
        if timer >= ctrl.hold_duration - _TIME_EPS:
            return replace(ctrl, phase=Phase.DESCENT, phase_timer=0.0, current_gain=target)
        return replace(ctrl, phase_timer=timer, current_gain=target)

    # Descent: linear in time, the attention value is not consulted
    if timer >= ctrl.descent_duration - _TIME_EPS:
        return replace(ctrl, phase=Phase.IDLE, phase_timer=0.0, current_gain=base)
    frac = timer / ctrl.descent_duration
    return replace(ctrl, phase_timer=timer, current_gain=target + (base - target) * frac)


def scheduled_gain(
    t_since_trigger: float | None,
    mode: GainProfileMode | str,
    base: float = 1.0,
    target: float = 1.0,
) -> float:
    """Gain of the clock-driven control profiles.

    SCHEDULED ramps linearly to ``target`` over 200 ms, holds 300 ms and
    ramps back over 50 ms.  SWITCH sits at ``target`` from the trigger until
    the end of the hold (500 ms), then drops back.  ``None`` or a negative
    time means the trigger has not fired yet and gives ``base``.
    """
    try:
        mode = GainProfileMode(mode)
    except ValueError:
        raise ConfigError(f"unknown gain profile mode {mode!r}") from None
    if mode is GainProfileMode.DYNAMIC:
        raise ConfigError("DYNAMIC gain is produced by controller_step, not a schedule")
    if t_since_trigger is None or t_since_trigger < 0:
        return base
    t = t_since_trigger
    hold_end = ASCENT_DURATION + HOLD_DURATION
    if mode is GainProfileMode.SWITCH:
        return target if t < hold_end - _TIME_EPS else base
    if t < ASCENT_DURATION - _TIME_EPS:
        return base + (target - base) * t / ASCENT_DURATION
    if t < hold_end - _TIME_EPS:
        return target
    if t < hold_end + DESCENT_DURATION - _TIME_EPS:
        return target + (base - target) * (t - hold_end) / DESCENT_DURATION
    return base


def apply_translation_gain(physical_delta: float, g: float) -> float:
    """Virtual displacement produced by ``physical_delta`` metres of walking at gain ``g``."""
    if not g > 0:
        raise InvalidGainError(f"translation gain must be positive, got {g}")
    return physical_delta * g


def physical_from_virtual(virtual_delta: float, g: float) -> float:
    """Inverse of :func:`apply_translation_gain`."""
    if not g > 0:
        raise InvalidGainError(f"translation gain must be positive, got {g}")
    return virtual_delta / g
