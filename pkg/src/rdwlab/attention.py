"""Head-direction attention model.

The attention degree is an accumulator driven by the angle between the
user's view ray and the distractor centroid.  While that angle stays under
``d`` the accumulator grows with a Gaussian-weighted rate ``a``; once the
user looks away it drains linearly at rate ``b``.  A short onset hold at the
start of each focus episode keeps the value constant while attention settles.

Coordinates are Unity-like: ``x`` and ``z`` span the floor, ``y`` is up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, ParameterError

__all__ = [
    "AttentionParams",
    "AttentionState",
    "Pose",
    "gaze_angle",
    "attention_step",
    "FRAME_DT",
]

#: Nominal frame period of the target headset (90 Hz).
FRAME_DT = 1.0 / 90.0


@dataclass(frozen=True)
class AttentionParams:
    """Hyper-parameters of the attention accumulator.

    Attributes
    ----------
    a : float
        Accumulation rate in attention-units per second at zero gaze angle.
    b : float
        Linear decay rate in attention-units per second once gaze leaves the cone.
    c : float
        Width (degrees) of the Gaussian weighting on the gaze angle.
    d : float
        Gaze-angle threshold in degrees; focus means ``deg < d``.
    a_max : float
        Attention ceiling.  ``b * 0.050`` with the defaults, so a full
        accumulator drains in exactly the 50 ms descent window.
    onset_hold : float
        Seconds at the start of each focus episode during which attention
        is held constant.
    """

    a: float = 5000.0
    b: float = 2000.0
    c: float = 3.1
    d: float = 15.0
    a_max: float = 100.0
    onset_hold: float = 0.033

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise ParameterError(f"a, b, c must be positive, got {self.a}, {self.b}, {self.c}")
        if not 0 < self.d <= 90:
            raise ParameterError(f"d must lie in (0, 90], got {self.d}")
        if not self.a_max > 0:
            raise ParameterError(f"a_max must be positive, got {self.a_max}")
        if self.onset_hold < 0:
            raise ParameterError(f"onset_hold must be >= 0, got {self.onset_hold}")


@dataclass(frozen=True)
class AttentionState:
    """Accumulated attention plus the time already spent in the current onset hold."""

    attention: float = 0.0
    time_in_hold: float = 0.0


@dataclass(frozen=True)
class Pose:
    """Viewer pose on the physical floor.

    ``position`` is the floor point ``(x, z)``; ``height`` lifts it to eye
    level.  ``view_direction`` is normalised on construction.
    """

    position: tuple[float, float] = (0.0, 0.0)
    view_direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    height: float = 1.6

    def __post_init__(self):
        v = np.asarray(self.view_direction, dtype=float)
        norm = float(np.linalg.norm(v))
        if v.shape != (3,) or not math.isfinite(norm) or norm == 0.0:
            raise DegenerateGeometryError(f"invalid view direction {self.view_direction!r}")
        object.__setattr__(self, "view_direction", tuple(float(c) for c in v / norm))
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))

    @property
    def eye(self) -> np.ndarray:
        return np.array([self.position[0], self.height, self.position[1]])


def gaze_angle(pose: Pose, distractor_centroid) -> float:
    """Angle in degrees between the view ray and the eye-to-centroid vector."""
    to_target = np.asarray(distractor_centroid, dtype=float) - pose.eye
    dist = float(np.linalg.norm(to_target))
    if dist < 1e-12:
        raise DegenerateGeometryError("distractor centroid coincides with the eye position")
    cos = float(np.dot(pose.view_direction, to_target)) / dist
    return math.degrees(math.acos(min(1.0, max(-1.0, cos))))


def attention_step(
    state: AttentionState,
    deg: float,
    dt: float = FRAME_DT,
    params: AttentionParams = AttentionParams(),
) -> AttentionState:
    """Advance the attention accumulator by one frame.

    The onset hold is charged against ``dt`` before any accumulation, so a
    frame that straddles the end of the hold only accumulates over the part
    of the frame after it.  Looking away resets the hold, so every new focus
    episode pays it again.
    """
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    p = params
    if deg < p.d:
        held = min(dt, max(0.0, p.onset_hold - state.time_in_hold))
        rate = p.a * math.exp(-(deg * deg) / (2.0 * p.c * p.c))
        attention = state.attention + rate * (dt - held)
        time_in_hold = state.time_in_hold + held
    else:
        attention = state.attention - p.b * dt
        time_in_hold = 0.0
    return AttentionState(min(p.a_max, max(0.0, attention)), time_in_hold)
