"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (see ``conftest.py``) before asserting,
so the summary shows every verdict even when one of them fails.
"""

import filecmp
import time

import numpy as np

from rdwlab.attention import FRAME_DT, AttentionParams, AttentionState, attention_step
from rdwlab.cli import main, pipeline_table, run_simulation
from rdwlab.config import OUTPUT_DIR_ENV, FitOptions, PlanConfig, RunConfig
from rdwlab.psychometrics import PsyParams, ResponseDataset, chi_square_2x2, fit_psychometric, psychometric_value, thresholds
from rdwlab.sequencing import DEFAULT_GAINS
from rdwlab.sim import Group, Scenario, instant_focus, linear_turn, run_trial

# a flat observer for the distractor group, steeper ones for the controls
GROUP_TRUTH = (
    (Group.WITH_DISTRACTOR, PsyParams(1.08, 2.81)),
    (Group.WITHOUT_DISTRACTOR, PsyParams(1.03, 5.62)),
    (Group.SWITCH, PsyParams(1.02, 6.74)),
)


def test_chi_square_anchor(acceptance):
    stat = chi_square_2x2([[4, 10], [10, 4]]).statistic
    ok = abs(stat - 5.143) <= 0.001
    acceptance(1, ok, f"chi2 = {stat:.4f} (want 5.143 +/- 0.001)")
    assert ok


def test_threshold_consistency_anchor(acceptance):
    got = thresholds(PsyParams(1.03, 5.6208))
    ok = all(abs(g - w) <= 0.001 for g, w in zip(got, (0.910, 1.030, 1.150)))
    acceptance(2, ok, "LDT/PSE/UDT = ({:.4f}, {:.4f}, {:.4f}) (want 0.910/1.030/1.150 +/- 0.001)".format(*got))
    assert ok


def test_controller_timing(acceptance):
    start = time.perf_counter()
    sc = Scenario()
    fast = run_trial(sc, (Group.WITH_DISTRACTOR, 1.3), instant_focus())
    turns = [run_trial(sc, (Group.WITH_DISTRACTOR, 1.3), linear_turn(d)).t1_duration
             for d in (0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6)]
    hold = fast.phase.count("hold") * FRAME_DT
    descent = fast.phase.count("descent") * FRAME_DT
    elapsed = time.perf_counter() - start
    tol = FRAME_DT + 1e-9
    checks = {
        "instant t1": abs(fast.t1_duration - 0.053) <= tol,
        "turn t1 range": all(t is not None and 0.060 <= t <= 0.713 for t in turns),
        "hold": abs(hold - 0.300) <= tol,
        "descent": abs(descent - 0.050) <= tol,
        "runtime": elapsed < 1.0,
    }
    ok = all(checks.values())
    acceptance(3, ok, f"t1 instant = {fast.t1_duration:.4f} s, turns {min(turns):.3f}..{max(turns):.3f} s, "
                      f"hold = {hold:.4f} s, descent = {descent:.4f} s, {elapsed:.2f} s"
                      + ("" if ok else f" failed: {[k for k, v in checks.items() if not v]}"))
    assert ok


def test_attention_dynamics(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    p = AttentionParams()
    violations = []
    for _ in range(10_000):
        state = AttentionState(rng.uniform(0, p.a_max), rng.choice([0.0, rng.uniform(0, 0.05)]))
        deg = rng.uniform(0, 60)
        dt = rng.uniform(1e-4, 0.05)
        out = attention_step(state, deg, dt, p)
        if not 0.0 <= out.attention <= p.a_max:
            violations.append("clamp")
        if deg < p.d and out.attention < state.attention:
            violations.append("focus branch decreased")
        if deg >= p.d and out.attention > state.attention:
            violations.append("away branch increased")
    boundary = attention_step(AttentionState(0.0, p.onset_hold), 14.99, 1 / 90, p).attention
    elapsed = time.perf_counter() - start
    ok = not violations and boundary < 5e-4 and elapsed < 10
    acceptance(4, ok, f"10000 random steps, {len(violations)} violations, "
                      f"boundary increment {boundary:.2e} (< 5e-4), {elapsed:.2f} s")
    assert ok


def test_fit_recovery(acceptance):
    start = time.perf_counter()
    truth = PsyParams(1.0, 6.0)
    x = np.array(DEFAULT_GAINS)
    n = np.full(len(x), 130)
    psi = psychometric_value(x, truth)
    good, worst_sse = 0, 0.0
    for seed in range(100):
        k = np.random.default_rng(seed).binomial(n, psi)
        fit = fit_psychometric(ResponseDataset.from_counts(x, n, k))
        if abs(fit.params.alpha - 1.0) <= 0.02 and abs(fit.params.beta / 6.0 - 1.0) <= 0.15:
            good += 1
        worst_sse = max(worst_sse, fit.sse)
    elapsed = time.perf_counter() - start
    ok = good >= 95 and worst_sse <= 0.05 and elapsed < 120
    acceptance(5, ok, f"{good}/100 recovered (need >= 95), max SSE {worst_sse:.4f} (<= 0.05), {elapsed:.1f} s")
    assert ok


def test_end_to_end_pipeline(acceptance):
    start = time.perf_counter()
    widths = []
    rows_ok = True
    for seed in range(10):
        cfg = RunConfig(plan=PlanConfig(seed=seed, participants=26), fit=FitOptions(n_boot=100),
                        responders=GROUP_TRUTH)
        rows = pipeline_table(cfg, run_simulation(cfg))
        rows_ok &= [r["group"] for r in rows] == [g.value for g, _ in GROUP_TRUTH]
        widths.append([r["udt"] - r["ldt"] for r in rows])
    widths = np.array(widths)
    wider = int(np.sum((widths[:, 0] > widths[:, 1]) & (widths[:, 0] > widths[:, 2])))
    elapsed = time.perf_counter() - start
    ok = rows_ok and wider == 10 and elapsed < 60
    acceptance(6, ok, f"3-row tables: {rows_ok}; group 1 widest in {wider}/10 seeds "
                      f"(mean widths {np.round(widths.mean(axis=0), 3).tolist()}), {elapsed:.1f} s")
    assert ok


def test_geometry_and_bounds(acceptance):
    start = time.perf_counter()
    sc = Scenario()
    bad = []
    for group in Group:
        for g in DEFAULT_GAINS:
            tr = run_trial(sc, (group, g), linear_turn(0.15))
            inside = (np.all((tr.phys_x >= 0) & (tr.phys_x <= sc.physical_bounds[0]))
                      and np.all((tr.phys_z >= 0) & (tr.phys_z <= sc.physical_bounds[1])))
            if not inside or tr.bounds_violation or abs(tr.virtual_dist[-1] - 8.0) > tr.virtual_step:
                bad.append((group.value, g))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    acceptance(7, ok, f"33 trials, {len(bad)} outside bounds or off the 8 m target, {elapsed:.2f} s")
    assert ok


def _run_all_subcommands(root, capsys):
    counts = root / "counts.csv"
    counts.parent.mkdir(parents=True)
    counts.write_text("gain,n,k\n" + "".join(
        f"{g},130,{k}\n" for g, k in zip(DEFAULT_GAINS, [2, 5, 10, 20, 40, 60, 85, 100, 115, 122, 127])))
    codes = [
        main(["simulate", "--seed", "5", "--output-dir", str(root / "simulate")]),
        main(["fit", str(counts), "--n-boot", "200", "--seed", "3", "--output-dir", str(root / "fit")]),
        main(["fit", str(root / "simulate" / "summary.csv"), "--group", "without_distractor", "--n-boot", "100",
              "--name", "from_summary", "--output-dir", str(root / "fit")]),
        main(["pipeline", "--seed", "5", "--participants", "3", "--n-boot", "100", "--no-frames",
              "--output-dir", str(root / "pipeline")]),
        main(["sequence", "--seed", "7", "--output", str(root / "sequence.json")]),
        main(["chisq", "4", "10", "10", "4"]),
    ]
    (root / "stdout.txt").write_text(capsys.readouterr().out.replace(str(root), "<root>"))
    return codes


def _tree_diff(a, b):
    cmp = filecmp.dircmp(a, b)
    diffs = list(cmp.left_only) + list(cmp.right_only)
    _, mismatch, errors = filecmp.cmpfiles(a, b, cmp.common_files, shallow=False)
    diffs += mismatch + errors
    for sub in cmp.common_dirs:
        diffs += [f"{sub}/{d}" for d in _tree_diff(a / sub, b / sub)]
    return diffs


def test_determinism(acceptance, tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    start = time.perf_counter()
    codes_a = _run_all_subcommands(tmp_path / "a", capsys)
    codes_b = _run_all_subcommands(tmp_path / "b", capsys)
    diffs = _tree_diff(tmp_path / "a", tmp_path / "b")
    n_files = sum(1 for p in (tmp_path / "a").rglob("*") if p.is_file())
    elapsed = time.perf_counter() - start
    ok = codes_a == codes_b == [0] * 6 and not diffs and elapsed < 60
    acceptance(8, ok, f"{n_files} files compared across simulate/fit/pipeline/sequence/chisq, "
                      f"{len(diffs)} differ, exit codes {codes_a}, {elapsed:.1f} s")
    assert ok
