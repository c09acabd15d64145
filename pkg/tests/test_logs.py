import math

import numpy as np
import pytest

from rdwlab.batch import SyntheticResponder, TrialPlan, batch_run
from rdwlab.errors import ConfigError, ParameterError
from rdwlab.logs import (
    format_cell,
    read_dataset_csv,
    read_summary_rows,
    write_counts_csv,
    write_frames_csv,
    write_summary_csv,
)
from rdwlab.psychometrics import ResponseDataset
from rdwlab.sim import Group, Scenario, linear_turn, never_look


def test_format_cell():
    assert format_cell(None) == ""
    assert format_cell(True) == "true"
    assert format_cell(0.1) == "0.1"
    assert format_cell(np.float64(1 / 3)) == repr(1 / 3)
    assert format_cell(math.nan) == "nan"
    assert format_cell(7) == "7"


def test_frames_round_trip_exactly(tmp_path):
    res = batch_run(TrialPlan(Group.WITH_DISTRACTOR, repetitions=1), Scenario(), SyntheticResponder(),
                    gaze=linear_turn(0.2))
    trace = res.traces[0]
    write_frames_csv(trace, tmp_path / "f.csv")
    data = np.genfromtxt(tmp_path / "f.csv", delimiter=",", names=True)
    np.testing.assert_array_equal(data["gain"], trace.gain)
    np.testing.assert_array_equal(data["phys_z"], trace.phys_z)
    assert np.isnan(data["deg"][0])


def test_summary_aggregates_included_trials_only(tmp_path):
    gaze = [linear_turn(0.15), never_look()]
    a = batch_run(TrialPlan(Group.WITH_DISTRACTOR, seed=2), Scenario(), SyntheticResponder(), gaze=gaze)
    b = batch_run(TrialPlan(Group.SWITCH, seed=2), Scenario(), SyntheticResponder())
    path = tmp_path / "summary.csv"
    write_summary_csv((a + b).records, path)
    rows = read_summary_rows(path)
    assert len(rows) == 110
    assert rows[0]["response"] in ("greater", "smaller")
    dyn = read_dataset_csv(path, group="with_distractor")
    assert dyn == a.dataset
    assert read_dataset_csv(path).n.sum() == 110 - a.excluded


def test_counts_round_trip(tmp_path):
    d = ResponseDataset.from_counts([0.5, 1.0, 1.5], [10, 12, 9], [1, 6, 8])
    write_counts_csv(d, tmp_path / "c.csv")
    assert read_dataset_csv(tmp_path / "c.csv") == d


def test_bad_files(tmp_path):
    odd = tmp_path / "odd.csv"
    odd.write_text("foo,bar\n1,2\n")
    with pytest.raises(ConfigError):
        read_dataset_csv(odd)
    broken = tmp_path / "broken.csv"
    broken.write_text("gain,n,k\n0.5,ten,1\n")
    with pytest.raises(ParameterError):
        read_dataset_csv(broken)
