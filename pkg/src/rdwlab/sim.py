"""Fixed-timestep reconstruction of one escort trial.

The walker advances along a straight virtual path at constant virtual speed.
Physical travel per frame is the virtual step divided by the frame's gain.
When virtual progress reaches ``path_length - trigger_lead`` the trigger
fires once and the group's gain profile takes over: the attention-driven
controller (fed by a scripted gaze angle) for the distractor group, the
clock-driven envelopes for the two control groups.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .attention import FRAME_DT, AttentionParams, AttentionState, attention_step
from .controller import (
    GainController,
    GainProfileMode,
    controller_step,
    scheduled_gain,
)
from .errors import ConfigError, ParameterError

__all__ = [
    "Group",
    "Side",
    "Scenario",
    "GazeScript",
    "gaze_script_preset",
    "instant_focus",
    "linear_turn",
    "glance",
    "never_look",
    "TrialTrace",
    "run_trial",
    "distractor_centroid",
    "BASE_GAIN",
]

BASE_GAIN = 1.0


class Group(enum.Enum):
    WITH_DISTRACTOR = "with_distractor"
    WITHOUT_DISTRACTOR = "without_distractor"
    SWITCH = "switch"

    @property
    def mode(self) -> GainProfileMode:
        return _GROUP_MODE[self]


_GROUP_MODE = {
    Group.WITH_DISTRACTOR: GainProfileMode.DYNAMIC,
    Group.WITHOUT_DISTRACTOR: GainProfileMode.SCHEDULED,
    Group.SWITCH: GainProfileMode.SWITCH,
}


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    NONE = "none"


@dataclass(frozen=True)
class Scenario:
    """Trial geometry and walker kinematics.

    The distractor fields (side, speed, lateral offset, lead ahead of the
    walker, centroid height) are illustrative defaults; they only matter
    when a gaze angle is derived from geometry via :func:`distractor_centroid`.
    ``start`` defaults to a point that centres the path inside the room.
    """

    physical_bounds: tuple[float, float] = (10.0, 10.0)
    virtual_path_length: float = 8.0
    trigger_lead: float = 1.5
    walk_speed: float = 1.0
    distractor_side: Side = Side.LEFT
    distractor_speed: float = 1.0
    distractor_offset: float = 4.0
    distractor_ahead: float = 3.0
    distractor_height: float = 1.0
    start: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "distractor_side", Side(self.distractor_side))
        object.__setattr__(self, "physical_bounds", tuple(float(v) for v in self.physical_bounds))
        if self.start is not None:
            object.__setattr__(self, "start", tuple(float(v) for v in self.start))
        if not self.virtual_path_length > self.trigger_lead > 0:
            raise ConfigError("need virtual_path_length > trigger_lead > 0")
        if not self.walk_speed > 0:
            raise ConfigError("walk_speed must be positive")
        if min(self.physical_bounds) <= 0:
            raise ConfigError("physical_bounds must be positive")
        if self.distractor_speed < 0:
            raise ConfigError("distractor_speed must be >= 0")

    @property
    def start_position(self) -> tuple[float, float]:
        if self.start is not None:
            return self.start
        w, h = self.physical_bounds
        return (w / 2.0, max(0.0, (h - self.virtual_path_length) / 2.0))


def distractor_centroid(scenario: Scenario, t_since_trigger: float):
    """Virtual-space centroid ``(x, y, z)`` of the distractor.

    The path runs along +z from the origin.  The distractor appears
    ``distractor_offset`` metres to one side and ``distractor_ahead`` metres
    beyond the trigger point, then walks toward the path centre line.
    Returns None for ``Side.NONE``.
    """
    if scenario.distractor_side is Side.NONE:
        return None
    sign = -1.0 if scenario.distractor_side is Side.LEFT else 1.0
    lateral = max(0.0, scenario.distractor_offset - scenario.distractor_speed * max(t_since_trigger, 0.0))
    z = scenario.virtual_path_length - scenario.trigger_lead + scenario.distractor_ahead
    return np.array([sign * lateral, scenario.distractor_height, z])


@dataclass(frozen=True)
class GazeScript:
    """Piecewise-linear gaze angle (degrees) as a function of time since trigger.

    Each segment is ``(duration, deg_start, deg_end)``.  Past the last
    segment the final angle is held.
    """

    segments: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        segs = tuple((float(d), float(a), float(b)) for d, a, b in self.segments)
        if not segs:
            raise ConfigError("gaze script needs at least one segment")
        for d, a, b in segs:
            if not d > 0:
                raise ConfigError(f"segment duration must be positive, got {d}")
            if not (0 <= a <= 180 and 0 <= b <= 180):
                raise ConfigError(f"gaze angles must lie in [0, 180], got {a}, {b}")
        object.__setattr__(self, "segments", segs)

    def deg_at(self, t: float) -> float:
        start = 0.0
        for dur, a, b in self.segments:
            if t < start + dur:
                u = max(0.0, t - start) / dur
                return a + (b - a) * u
            start += dur
        return self.segments[-1][2]

    @property
    def duration(self) -> float:
        return sum(d for d, _, _ in self.segments)


def instant_focus() -> GazeScript:
    return GazeScript(((1.0, 0.0, 0.0),))


def linear_turn(duration: float) -> GazeScript:
    """Head turns from 40 degrees off the distractor to dead-on, then stays."""
    if not duration > 0:
        raise ConfigError("linear_turn duration must be positive")
    return GazeScript(((duration, 40.0, 0.0),))


def glance(on: float, off: float, cycles: int = 1) -> GazeScript:
    """``cycles`` repetitions of looking at the distractor for ``on`` s then away (90 deg) for ``off`` s."""
    if not (on > 0 and off > 0 and cycles >= 1):
        raise ConfigError("glance needs on > 0, off > 0, cycles >= 1")
    return GazeScript(((on, 0.0, 0.0), (off, 90.0, 90.0)) * int(cycles))


def never_look() -> GazeScript:
    return GazeScript(((1.0, 90.0, 90.0),))


_PRESETS = {
    "instant_focus": instant_focus,
    "linear_turn": linear_turn,
    "glance": glance,
    "never_look": never_look,
}


def gaze_script_preset(name: str, **kwargs) -> GazeScript:
    """Build a named preset: ``instant_focus``, ``linear_turn(duration)``,
    ``glance(on, off, cycles)`` or ``never_look``."""
    key = name.lower().replace("-", "_")
    if key not in _PRESETS:
        raise ConfigError(f"unknown gaze preset {name!r}; choose from {sorted(_PRESETS)}")
    try:
        return _PRESETS[key](**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad arguments for gaze preset {name!r}: {exc}") from None


@dataclass(frozen=True, eq=False)
class TrialTrace:
    """Per-frame record of one trial plus its summary fields.

    Frame arrays all have one entry per simulated frame; ``t`` is the time
    at the end of the frame.  ``deg`` is NaN where no distractor gaze is
    simulated.  ``phase`` holds the controller phase name per frame (the
    control groups report ``"scheduled"``).
    """

    group: Group
    target_gain: float
    dt: float
    t: np.ndarray
    phys_x: np.ndarray
    phys_z: np.ndarray
    virtual_dist: np.ndarray
    deg: np.ndarray
    attention: np.ndarray
    gain: np.ndarray
    phase: tuple[str, ...]
    trigger_frame: int
    t1_duration: float | None
    max_gain_reached: bool
    physical_distance: float
    bounds_violation: bool

    @property
    def trigger_progress(self) -> float:
        """Virtual progress at the start of the frame the trigger fired in."""
        return float(self.virtual_dist[self.trigger_frame] - self.virtual_step)

    @property
    def virtual_step(self) -> float:
        return float(self.virtual_dist[0])

    @property
    def frames(self) -> int:
        return len(self.t)


def run_trial(
    scenario: Scenario,
    plan_entry: tuple[Group | str, float],
    gaze: GazeScript | None = None,
    params: AttentionParams = AttentionParams(),
    dt: float = FRAME_DT,
) -> TrialTrace:
    """Simulate one trial of ``plan_entry = (group, target_gain)``.

    ``gaze`` is required for the distractor group and ignored otherwise.
    Leaving the physical bounds flags the trace but does not stop the trial.
    """
    group = Group(plan_entry[0])
    target = float(plan_entry[1])
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if not target > 0:
        raise ConfigError(f"target gain must be positive, got {target}")
    if group is Group.WITH_DISTRACTOR and gaze is None:
        raise ConfigError("the distractor group needs a gaze script")

    sc = scenario
    step = sc.walk_speed * dt
    n_frames = math.ceil(sc.virtual_path_length / step - 1e-9)
    trigger_frame = math.ceil((sc.virtual_path_length - sc.trigger_lead) / step - 1e-9)
    x0, z0 = sc.start_position
    width, height = sc.physical_bounds

    dynamic = group is Group.WITH_DISTRACTOR
    state = AttentionState()
    ctrl = GainController(base_gain=BASE_GAIN, target_gain=target)

    t = np.arange(1, n_frames + 1) * dt
    virtual = np.arange(1, n_frames + 1) * step
    deg = np.full(n_frames, np.nan)
    attention = np.zeros(n_frames)
    gain = np.full(n_frames, BASE_GAIN)
    phase = ["idle"] * n_frames
    reached = False

    for i in range(trigger_frame, n_frames):
        tau = (i - trigger_frame) * dt
        if dynamic:
            deg[i] = gaze.deg_at(tau)
            state = attention_step(state, deg[i], dt, params)
            ctrl = controller_step(ctrl, state, dt, params, trigger=(i == trigger_frame))
            attention[i] = state.attention
            gain[i] = ctrl.current_gain
            phase[i] = ctrl.phase.value
        else:
            gain[i] = scheduled_gain(tau, group.mode, BASE_GAIN, target)
            phase[i] = "scheduled"
            reached = reached or gain[i] == target

    phys_steps = step / gain
    phys_z = z0 + np.cumsum(phys_steps)
    phys_x = np.full(n_frames, x0)
    outside = (phys_x < 0) | (phys_x > width) | (phys_z < 0) | (phys_z > height)

    if dynamic:
        reached = ctrl.reached_max
    for arr in (t, virtual, deg, attention, gain, phys_x, phys_z):
        arr.setflags(write=False)
    return TrialTrace(
        group=group,
        target_gain=target,
        dt=dt,
        t=t,
        phys_x=phys_x,
        phys_z=phys_z,
        virtual_dist=virtual,
        deg=deg,
        attention=attention,
        gain=gain,
        phase=tuple(phase),
        trigger_frame=trigger_frame,
        t1_duration=ctrl.t1 if dynamic else None,
        max_gain_reached=bool(reached),
        physical_distance=float(np.sum(phys_steps)),
        bounds_violation=bool(outside.any() or not (0 <= x0 <= width and 0 <= z0 <= height)),
    )


@lru_cache(maxsize=8192)
def cached_trial(scenario, group, target, gaze, params, dt) -> TrialTrace:
    """Memoised :func:`run_trial`; trials are deterministic so sharing traces is safe."""
    return run_trial(scenario, (group, target), gaze, params, dt)
