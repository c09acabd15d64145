"""CSV formats: per-frame trial logs, batch summaries and count datasets.

Floats are written with ``repr`` so files are byte-stable across runs.
"""

from __future__ import annotations

import csv
import math
import os
from typing import Iterable

from .batch import TrialRecord
from .errors import ConfigError, ParameterError
from .psychometrics import ResponseDataset
from .sim import Group, TrialTrace

__all__ = [
    "FRAME_COLUMNS",
    "SUMMARY_COLUMNS",
    "COUNT_COLUMNS",
    "write_frames_csv",
    "write_summary_csv",
    "write_counts_csv",
    "read_dataset_csv",
    "read_summary_rows",
    "format_cell",
]

FRAME_COLUMNS = ("t", "phys_x", "phys_z", "virtual_dist", "deg", "attention", "gain")
SUMMARY_COLUMNS = ("trial_id", "group", "target_gain", "t1", "max_gain_reached",
                   "physical_distance", "response", "participant", "bounds_violation")
COUNT_COLUMNS = ("gain", "n", "k")


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_frames_csv(trace: TrialTrace, path: str | os.PathLike) -> None:
    cols = [trace.t, trace.phys_x, trace.phys_z, trace.virtual_dist, trace.deg, trace.attention, trace.gain]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FRAME_COLUMNS)
        for row in zip(*cols):
            w.writerow([format_cell(v) for v in row])


def write_summary_csv(records: Iterable[TrialRecord], path: str | os.PathLike) -> None:
    """One row per trial; ``trial_id`` numbers rows across the whole file."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for i, r in enumerate(records):
            w.writerow([
                i, r.group.value, format_cell(r.target_gain), format_cell(r.t1), format_cell(r.max_gain_reached),
                format_cell(r.physical_distance), "greater" if r.response else "smaller",
                r.participant, format_cell(r.bounds_violation),
            ])


def write_counts_csv(data: ResponseDataset, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COUNT_COLUMNS)
        for lv in data.levels:
            w.writerow([format_cell(lv.x), lv.n, lv.k])


def _parse_bool(s: str) -> bool:
    s = s.strip().lower()
    if s in ("true", "1", "yes"):
        return True
    if s in ("false", "0", "no"):
        return False
    raise ParameterError(f"not a boolean: {s!r}")


def read_dataset_csv(path: str | os.PathLike, group: Group | str | None = None) -> ResponseDataset:
    """Load counts from a ``gain,n,k`` file or aggregate a batch summary file.

    For summaries, only trials with ``max_gain_reached`` count, optionally
    restricted to one ``group``.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        rows = list(reader)
    if set(COUNT_COLUMNS) <= set(header):
        try:
            return ResponseDataset.from_counts(
                [float(r["gain"]) for r in rows], [int(r["n"]) for r in rows], [int(r["k"]) for r in rows])
        except (KeyError, ValueError) as exc:
            raise ParameterError(f"{path}: malformed count row ({exc})") from None
    if {"target_gain", "response", "max_gain_reached"} <= set(header):
        want = Group(group).value if group is not None else None
        gains: list[float] = []
        answers: list[bool] = []
        for r in rows:
            if want is not None and r.get("group") != want:
                continue
            if not _parse_bool(r["max_gain_reached"]):
                continue
            gains.append(float(r["target_gain"]))
            answers.append(r["response"].strip().lower() == "greater")
        if not gains:
            raise ParameterError(f"{path}: no included trials" + (f" for group {want}" if want else ""))
        return ResponseDataset.from_trials(gains, answers)
    raise ConfigError(f"{path}: unrecognised CSV header {list(header)}; expected gain,n,k or a batch summary")


def read_summary_rows(path: str | os.PathLike) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
