"""JSON run configuration.

A config file is one JSON object; every section is optional and falls
back to the defaults below::

    {
      "scenario":  {"virtual_path_length": 8.0, "trigger_lead": 1.5, ...},
      "attention": {"a": 5000, "b": 2000, "c": 3.1, "d": 15, "a_max": 100, "onset_hold": 0.033},
      "plan":      {"groups": ["with_distractor", "without_distractor", "switch"],
                    "gains": [0.5, ..., 1.5], "repetitions": 5, "seed": 0, "participants": 1},
      "responders": {"with_distractor": {"alpha": 1.03, "beta": 5.62}, ...},
      "gaze":      [{"name": "linear_turn", "duration": 0.15}],
      "fit":       {"fix_gamma": null, "fix_lambda": null, "n_boot": 1000, "ci_level": 0.95},
      "output_dir": "out",
      "write_frames": true
    }

``gaze`` entries are cycled by trial index within a block.  Besides the
named presets, ``{"name": "linear_turn_uniform", "low": .., "high": ..}``
draws a LinearTurn duration per trial.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from typing import Any

from .attention import FRAME_DT, AttentionParams
from .batch import SyntheticResponder, linear_turn_sampler
from .errors import ConfigError, RdwError
from .psychometrics import PsyParams
from .sequencing import DEFAULT_GAINS, DEFAULT_REPETITIONS
from .sim import Group, Scenario, Side, gaze_script_preset

__all__ = ["PlanConfig", "FitOptions", "RunConfig", "load_config", "OUTPUT_DIR_ENV"]

OUTPUT_DIR_ENV = "RDWLAB_OUTPUT_DIR"

DEFAULT_RESPONDER = PsyParams(1.03, 5.62)


@dataclass(frozen=True)
class PlanConfig:
    groups: tuple[Group, ...] = tuple(Group)
    gains: tuple[float, ...] = DEFAULT_GAINS
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0
    participants: int = 1

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(Group(g) for g in self.groups))
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        if not self.groups:
            raise ConfigError("groups: at least one group is required")
        if len(set(self.groups)) != len(self.groups):
            raise ConfigError("groups: duplicate group")
        if not self.gains or min(self.gains) <= 0:
            raise ConfigError("gains: must be non-empty and positive")
        if int(self.repetitions) < 1:
            raise ConfigError("repetitions: must be >= 1")
        if int(self.participants) < 1:
            raise ConfigError("participants: must be >= 1")


@dataclass(frozen=True)
class FitOptions:
    fix_gamma: float | None = None
    fix_lambda: float | None = None
    n_boot: int = 1000
    ci_level: float = 0.95

    def __post_init__(self):
        if self.n_boot != 0 and self.n_boot < 100:
            raise ConfigError("n_boot: must be 0 (no CI) or >= 100")
        if not 0 < self.ci_level < 1:
            raise ConfigError("ci_level: must lie in (0, 1)")
        for name in ("fix_gamma", "fix_lambda"):
            v = getattr(self, name)
            if v is not None and not 0 <= v < 1:
                raise ConfigError(f"{name}: must lie in [0, 1)")


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario = Scenario()
    attention: AttentionParams = AttentionParams()
    plan: PlanConfig = PlanConfig()
    responders: tuple[tuple[Group, PsyParams], ...] = ()
    gaze: tuple[tuple[tuple[str, Any], ...], ...] = ((("name", "linear_turn"), ("duration", 0.15)),)
    fit: FitOptions = FitOptions()
    output_dir: str | None = None
    write_frames: bool = True
    dt: float = FRAME_DT

    def responder_for(self, group: Group) -> SyntheticResponder:
        return SyntheticResponder(dict(self.responders).get(Group(group), DEFAULT_RESPONDER))

    def gaze_policy(self):
        """Callable ``(trial_index, rng) -> GazeScript`` cycling the configured entries."""
        makers = [_gaze_maker(dict(entry)) for entry in self.gaze]

        def policy(i, rng):
            return makers[i % len(makers)](i, rng)

        return policy

    def resolved_output_dir(self, override: str | None = None) -> str:
        return override or self.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "rdwlab-out"

    def to_dict(self) -> dict:
        return {
            "scenario": _plain(dataclasses.asdict(self.scenario)),
            "attention": dataclasses.asdict(self.attention),
            "plan": _plain(dataclasses.asdict(self.plan)),
            "responders": {g.value: p.to_dict() for g, p in self.responders},
            "gaze": [dict(e) for e in self.gaze],
            "fit": dataclasses.asdict(self.fit),
            "output_dir": self.output_dir,
            "write_frames": self.write_frames,
            "dt": self.dt,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        _no_extra("config", data, {f.name for f in dataclasses.fields(cls)})
        kw: dict[str, Any] = {}
        if "scenario" in data:
            kw["scenario"] = _section("scenario", Scenario, data["scenario"])
        if "attention" in data:
            kw["attention"] = _section("attention", AttentionParams, data["attention"])
        if "plan" in data:
            kw["plan"] = _section("plan", PlanConfig, data["plan"])
        if "fit" in data:
            kw["fit"] = _section("fit", FitOptions, data["fit"])
        if "responders" in data:
            kw["responders"] = _responders(data["responders"])
        if "gaze" in data:
            kw["gaze"] = _gaze(data["gaze"])
        if "output_dir" in data:
            kw["output_dir"] = None if data["output_dir"] is None else str(data["output_dir"])
        if "write_frames" in data:
            if not isinstance(data["write_frames"], bool):
                raise ConfigError("write_frames: must be true or false")
            kw["write_frames"] = data["write_frames"]
        if "dt" in data:
            dt = data["dt"]
            if not isinstance(dt, (int, float)) or not dt > 0:
                raise ConfigError("dt: must be a positive number")
            kw["dt"] = float(dt)
        return cls(**kw)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def load_config(path: str | os.PathLike | None) -> RunConfig:
    """Read a config file; ``None`` gives the defaults."""
    if path is None:
        return RunConfig()
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return RunConfig.from_dict(data)


def _plain(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, (Group, Side)):
            v = v.value
        elif isinstance(v, tuple):
            v = [x.value if isinstance(x, (Group, Side)) else x for x in v]
        out[k] = v
    return out


def _no_extra(where: str, data: dict, allowed: set[str]) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(extra)}")


def _section(where: str, cls, data):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: must be a JSON object")
    _no_extra(where, data, {f.name for f in dataclasses.fields(cls)})
    data = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
    try:
        return cls(**data)
    except (RdwError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _responders(data) -> tuple[tuple[Group, PsyParams], ...]:
    if not isinstance(data, dict):
        raise ConfigError("responders: must map group name to {alpha, beta, gamma, lambda}")
    out = []
    for name, p in data.items():
        try:
            group = Group(name)
        except ValueError:
            raise ConfigError(f"responders: unknown group {name!r}") from None
        if not isinstance(p, dict):
            raise ConfigError(f"responders.{name}: must be a JSON object")
        _no_extra(f"responders.{name}", p, {"alpha", "beta", "gamma", "lambda"})
        try:
            out.append((group, PsyParams.from_dict(p)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"responders.{name}: {exc}") from None
    return tuple(sorted(out, key=lambda gp: list(Group).index(gp[0])))


def _gaze(data) -> tuple[tuple[tuple[str, Any], ...], ...]:
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise ConfigError("gaze: must be a non-empty list of preset objects")
    out = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or "name" not in entry:
            raise ConfigError(f"gaze[{i}]: each entry needs a 'name'")
        try:
            _gaze_maker(entry)
        except RdwError as exc:
            raise ConfigError(f"gaze[{i}]: {exc}") from None
        out.append(tuple(entry.items()))
    return tuple(out)


def _gaze_maker(entry: dict):
    kwargs = {k: v for k, v in entry.items() if k != "name"}
    if entry["name"] == "linear_turn_uniform":
        try:
            return linear_turn_sampler(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad arguments for linear_turn_uniform: {exc}") from None
    script = gaze_script_preset(entry["name"], **kwargs)
    return lambda i, rng: script
