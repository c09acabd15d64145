import csv
import json

import numpy as np
import pytest

from rdwlab.cli import TABLE_COLUMNS, main
from rdwlab.config import OUTPUT_DIR_ENV
from rdwlab.logs import FRAME_COLUMNS, SUMMARY_COLUMNS
from rdwlab.psychometrics import PsyParams, psychometric_value
from rdwlab.sequencing import DEFAULT_GAINS


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _write_counts(path, k, n=130):
    with open(path, "w") as fh:
        fh.write("gain,n,k\n")
        for g, kk in zip(DEFAULT_GAINS, k):
            fh.write(f"{g},{n},{kk}\n")


@pytest.fixture(autouse=True)
def _no_env_dir(monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)


class TestSimulate:
    def test_default_run(self, tmp_path, capsys):
        assert main(["simulate", "--output-dir", str(tmp_path)]) == 0
        rows = _rows(tmp_path / "summary.csv")
        assert len(rows) == 165
        assert tuple(rows[0]) == SUMMARY_COLUMNS
        assert [r["trial_id"] for r in rows] == [str(i) for i in range(165)]
        frames = sorted((tmp_path / "trials").iterdir())
        assert len(frames) == 165
        assert tuple(_rows(frames[0])[0]) == FRAME_COLUMNS
        assert json.loads((tmp_path / "config.json").read_text())["plan"]["seed"] == 0
        out = capsys.readouterr().out
        assert "t1 [s]" in out and "0 excluded" in out

    def test_single_group(self, tmp_path):
        assert main(["simulate", "--group", "switch", "--no-frames", "--output-dir", str(tmp_path)]) == 0
        rows = _rows(tmp_path / "summary.csv")
        assert len(rows) == 55
        assert {r["group"] for r in rows} == {"switch"}
        assert not (tmp_path / "trials").exists()

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
        assert main(["simulate", "--group", "switch", "--no-frames"]) == 0
        assert (tmp_path / "env" / "summary.csv").exists()

    def test_config_error_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"plan": {"repetitions": 0}}))
        assert main(["simulate", "--config", str(cfg), "--output-dir", str(tmp_path)]) == 1
        assert "plan: repetitions" in capsys.readouterr().err

    def test_missing_config_exits_two(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == 2

    def test_bad_flag_exits_one(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--group", "bogus"])
        assert exc.value.code == 1


class TestFit:
    def test_fits_reference_counts(self, tmp_path, capsys):
        truth = PsyParams(1.03, 5.62)
        k = np.round(130 * psychometric_value(np.array(DEFAULT_GAINS), truth)).astype(int)
        data = tmp_path / "counts.csv"
        _write_counts(data, k)
        assert main(["fit", str(data), "--n-boot", "200", "--output-dir", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "fit.json").read_text())
        assert set(report) == {"params", "nll", "aic", "sse", "pse", "ldt", "udt", "pse_ci", "converged"}
        assert report["pse"] == pytest.approx(1.03, abs=0.01)
        assert report["ldt"] == pytest.approx(0.91, abs=0.01)
        assert report["udt"] == pytest.approx(1.15, abs=0.01)
        plot = _rows(tmp_path / "fit_plot.csv")
        kinds = [r["kind"] for r in plot]
        assert kinds.count("curve") == 200 and kinds.count("data") == 11
        assert {"ldt", "pse", "udt"} <= set(kinds)
        assert "PSE CI" in capsys.readouterr().out

    def test_step_data_exits_three(self, tmp_path, capsys):
        data = tmp_path / "step.csv"
        _write_counts(data, [0] * 6 + [130] * 5)
        assert main(["fit", str(data), "--output-dir", str(tmp_path)]) == 3
        assert "not identifiable" in capsys.readouterr().err

    def test_fit_from_summary(self, tmp_path):
        assert main(["simulate", "--group", "switch", "--participants", "4", "--no-frames",
                     "--output-dir", str(tmp_path)]) == 0
        assert main(["fit", str(tmp_path / "summary.csv"), "--group", "switch", "--n-boot", "0",
                     "--name", "sw", "--output-dir", str(tmp_path)]) == 0
        assert json.loads((tmp_path / "sw.json").read_text())["pse_ci"] is None

    def test_unknown_csv_exits_one(self, tmp_path):
        data = tmp_path / "x.csv"
        data.write_text("a,b\n1,2\n")
        assert main(["fit", str(data)]) == 1


class TestPipeline:
    def test_table_and_exclusions(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "gaze": [{"name": "linear_turn", "duration": 0.2}, {"name": "never_look"}],
            "plan": {"participants": 3},
            "fit": {"n_boot": 100},
        }))
        assert main(["pipeline", "--config", str(cfg), "--no-frames", "--output-dir", str(tmp_path)]) == 0
        table = _rows(tmp_path / "thresholds.csv")
        assert tuple(table[0]) == TABLE_COLUMNS
        assert [r["group"] for r in table] == ["with_distractor", "without_distractor", "switch"]
        summary = _rows(tmp_path / "summary.csv")
        dyn = [r for r in summary if r["group"] == "with_distractor"]
        # odd trial indices within each participant's block look away
        assert int(table[0]["excluded"]) == sum(r["max_gain_reached"] == "false" for r in dyn) == 3 * 27
        assert int(table[1]["excluded"]) == 0
        for r in table:
            assert float(r["ldt"]) < float(r["pse"]) < float(r["udt"])
            assert float(r["ci_low"]) <= float(r["pse"]) <= float(r["ci_high"])
        for name in ("fit_switch.json", "plot_switch.csv", "counts_switch.csv"):
            assert (tmp_path / name).exists()

    def test_all_excluded_exits_three(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"gaze": {"name": "never_look"}, "plan": {"groups": ["with_distractor"]}}))
        assert main(["pipeline", "--config", str(cfg), "--no-frames", "--output-dir", str(tmp_path)]) == 3


class TestSequenceAndChisq:
    def test_sequence_file(self, tmp_path):
        out = tmp_path / "seq.json"
        assert main(["sequence", "--seed", "10", "--output", str(out)]) == 0
        table = json.loads(out.read_text())
        assert [s["seed"] for s in table["sequences"]] == [10, 11, 12, 13, 14]
        assert all(sorted(s["sequence"]) == sorted(list(DEFAULT_GAINS) * 5) for s in table["sequences"])

    def test_sequence_stdout(self, capsys):
        assert main(["sequence", "--count", "2", "--reps", "1", "--gains", "0.8", "1.2"]) == 0
        assert len(json.loads(capsys.readouterr().out)["sequences"]) == 2

    def test_chisq(self, capsys):
        assert main(["chisq", "4", "10", "10", "4"]) == 0
        assert "= 5.143" in capsys.readouterr().out

    def test_chisq_zero_margin(self):
        assert main(["chisq", "0", "0", "1", "2"]) == 1
