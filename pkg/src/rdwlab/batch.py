"""Batch execution of trial plans with synthetic observers.

Randomness is split per trial so results do not depend on execution order:

* participant ``p``'s gain order is shuffled with
  ``participant_sequence_seed(seed, p)``, shared by all three groups;
* trial ``i`` of group ``g`` draws its response (and any sampled gaze
  script) from ``np.random.default_rng([seed, p, GROUP_CODE[g], i])``.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .attention import FRAME_DT, AttentionParams
from .errors import ConfigError, EmptyStatisticsError
from .psychometrics import PsyParams, ResponseDataset, psychometric_value
from .sequencing import DEFAULT_GAINS, DEFAULT_REPETITIONS, shuffle_gains
from .sim import GazeScript, Group, Scenario, TrialTrace, cached_trial, linear_turn

__all__ = [
    "GROUP_CODE",
    "TrialPlan",
    "SyntheticResponder",
    "TrialRecord",
    "BatchResult",
    "batch_run",
    "simulate_group",
    "participant_sequence_seed",
    "linear_turn_sampler",
    "T1Stats",
    "t1_statistics",
]

GROUP_CODE = {Group.WITH_DISTRACTOR: 0, Group.WITHOUT_DISTRACTOR: 1, Group.SWITCH: 2}

GazeSpec = Union[GazeScript, Sequence[GazeScript], Callable[[int, np.random.Generator], GazeScript], None]


@dataclass(frozen=True)
class TrialPlan:
    """One group block: which gains to present and in what order.

    If ``gain_sequence`` is None the order is the Fisher-Yates shuffle of
    ``gains`` x ``repetitions`` under ``seed``.
    """

    group: Group
    gain_sequence: tuple[float, ...] | None = None
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0
    gains: tuple[float, ...] = DEFAULT_GAINS

    def __post_init__(self):
        object.__setattr__(self, "group", Group(self.group))
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        if self.gain_sequence is not None:
            object.__setattr__(self, "gain_sequence", tuple(float(g) for g in self.gain_sequence))
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not self.gains or min(self.gains) <= 0:
            raise ConfigError("gains must be non-empty and positive")

    @property
    def sequence(self) -> tuple[float, ...]:
        if self.gain_sequence is not None:
            return self.gain_sequence
        return tuple(shuffle_gains(self.seed, self.gains, self.repetitions))


@dataclass(frozen=True)
class SyntheticResponder:
    """Stand-in observer answering "Greater" with probability psi(target gain).

    With ``step_at`` set the observer is deterministic and answers "Greater"
    exactly when the gain exceeds ``step_at``.
    """

    params: PsyParams | None = PsyParams(1.03, 5.62)
    step_at: float | None = None

    def p_greater(self, gain: float) -> float:
        if self.step_at is not None:
            return 1.0 if gain > self.step_at else 0.0
        return float(psychometric_value(gain, self.params))

    def respond(self, gain: float, rng: np.random.Generator) -> bool:
        p = self.p_greater(gain)
        u = rng.random()
        return bool(u < p)


class TrialRecord(NamedTuple):
    trial_id: int
    participant: int
    group: Group
    target_gain: float
    t1: float | None
    max_gain_reached: bool
    physical_distance: float
    bounds_violation: bool
    response: bool


@dataclass
class BatchResult:
    records: list[TrialRecord]
    traces: list[TrialTrace] = field(repr=False)

    @property
    def included(self) -> list[TrialRecord]:
        return [r for r in self.records if r.max_gain_reached]

    @property
    def excluded(self) -> int:
        return sum(not r.max_gain_reached for r in self.records)

    @property
    def dataset(self) -> ResponseDataset | None:
        """Counts over included trials, or None when every trial was excluded."""
        kept = self.included
        if not kept:
            return None
        return ResponseDataset.from_trials([r.target_gain for r in kept], [r.response for r in kept])

    def __add__(self, other: "BatchResult") -> "BatchResult":
        return BatchResult(self.records + other.records, self.traces + other.traces)


def linear_turn_sampler(low: float = 0.05, high: float = 0.5, decimals: int = 2):
    """Gaze policy drawing a LinearTurn duration uniformly from [low, high] per trial.

    Durations are rounded so repeated values share cached traces.
    """
    if not 0 < low <= high:
        raise ConfigError("need 0 < low <= high")

    def sample(trial_index: int, rng: np.random.Generator) -> GazeScript:
        return linear_turn(max(low, round(float(rng.uniform(low, high)), decimals)))

    return sample


def _gaze_for(gaze: GazeSpec, i: int, rng: np.random.Generator) -> GazeScript:
    if gaze is None:
        return linear_turn(0.15)
    if isinstance(gaze, GazeScript):
        return gaze
    if callable(gaze):
        return gaze(i, rng)
    return gaze[i % len(gaze)]


def batch_run(
    plan: TrialPlan,
    scenario: Scenario,
    responder: SyntheticResponder,
    seed: int = 0,
    gaze: GazeSpec = None,
    params: AttentionParams = AttentionParams(),
    dt: float = FRAME_DT,
    participant: int = 0,
) -> BatchResult:
    """Run every trial in ``plan`` and collect responses.

    ``gaze`` applies to the distractor group only: a single script, a list
    cycled by trial index, or a callable ``(trial_index, rng) -> GazeScript``.
    The default is ``linear_turn(0.15)``.  Every trial gets a response, but
    only trials that reached the maximum gain enter :attr:`BatchResult.dataset`.
    """
    group = plan.group
    records, traces = [], []
    for i, target in enumerate(plan.sequence):
        rng = np.random.default_rng([seed, participant, GROUP_CODE[group], i])
        script = _gaze_for(gaze, i, rng) if group is Group.WITH_DISTRACTOR else None
        trace = cached_trial(scenario, group, float(target), script, params, dt)
        response = responder.respond(target, rng)
        traces.append(trace)
        records.append(TrialRecord(
            trial_id=i,
            participant=participant,
            group=group,
            target_gain=float(target),
            t1=trace.t1_duration,
            max_gain_reached=trace.max_gain_reached,
            physical_distance=trace.physical_distance,
            bounds_violation=trace.bounds_violation,
            response=response,
        ))
    return BatchResult(records, traces)


def participant_sequence_seed(seed: int, participant: int) -> int:
    """64-bit shuffle seed for one participant, shared across that participant's groups."""
    ss = np.random.SeedSequence([int(seed), int(participant)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def simulate_group(
    group: Group | str,
    scenario: Scenario,
    responder: SyntheticResponder,
    n_participants: int = 1,
    seed: int = 0,
    gaze: GazeSpec = None,
    params: AttentionParams = AttentionParams(),
    dt: float = FRAME_DT,
    gains: Sequence[float] = DEFAULT_GAINS,
    repetitions: int = DEFAULT_REPETITIONS,
) -> BatchResult:
    """Pool ``n_participants`` blocks of one group; participant ``p``'s records carry ``participant=p``."""
    group = Group(group)
    total = None
    for p in range(n_participants):
        plan = TrialPlan(group, repetitions=repetitions, gains=tuple(gains),
                         seed=participant_sequence_seed(seed, p))
        res = batch_run(plan, scenario, responder, seed, gaze, params, dt, participant=p)
        total = res if total is None else total + res
    if total is None:
        raise ConfigError("n_participants must be >= 1")
    return total


class T1Stats(NamedTuple):
    min: float
    max: float
    median: float
    mean: float
    sd: float
    count: int


def t1_statistics(traces: Sequence[TrialTrace | TrialRecord]) -> T1Stats:
    """Summary of the recorded t1 durations (seconds).

    ``sd`` is the sample standard deviation, reported as 0 for a single value.
    """
    values = [tr.t1_duration if isinstance(tr, TrialTrace) else tr.t1 for tr in traces]
    values = [v for v in values if v is not None]
    if not values:
        raise EmptyStatisticsError("no trace recorded a t1 duration")
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return T1Stats(min(values), max(values), statistics.median(values),
                   statistics.fmean(values), sd, len(values))
