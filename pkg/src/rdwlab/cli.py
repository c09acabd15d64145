"""Command-line front end: ``rdwlab {simulate,fit,pipeline,sequence,chisq}``.

Exit codes: 0 success, 1 config/input error, 2 I/O error, 3 analysis
degeneracy (non-identifiable data or unreliable bootstrap).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .batch import BatchResult, simulate_group, t1_statistics
from .config import OUTPUT_DIR_ENV, RunConfig, load_config
from .errors import CIUnreliableError, ConfigError, EmptyStatisticsError, FitDegenerateError, RdwError
from .logs import format_cell, read_dataset_csv, write_counts_csv, write_frames_csv, write_summary_csv
from .psychometrics import PsyFit, ResponseDataset, chi_square_2x2, fit_psychometric, psychometric_value
from .sequencing import DEFAULT_GAINS, DEFAULT_REPETITIONS, sequence_table
from .sim import Group

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DEGENERATE = 0, 1, 2, 3

PLOT_POINTS = 200
PLOT_RANGE = (0.5, 1.5)
TABLE_COLUMNS = ("group", "n_trials", "excluded", "ldt", "pse", "udt", "aic", "sse",
                 "ci_low", "ci_high", "alpha", "beta", "converged")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    plan = cfg.plan
    if getattr(args, "seed", None) is not None:
        plan = dataclasses.replace(plan, seed=args.seed)
    if getattr(args, "group", None):
        plan = dataclasses.replace(plan, groups=tuple(Group(g) for g in args.group))
    if getattr(args, "participants", None) is not None:
        plan = dataclasses.replace(plan, participants=args.participants)
    cfg = dataclasses.replace(cfg, plan=plan)
    if getattr(args, "no_frames", False):
        cfg = dataclasses.replace(cfg, write_frames=False)
    fit = cfg.fit
    if getattr(args, "n_boot", None) is not None:
        fit = dataclasses.replace(fit, n_boot=args.n_boot)
    return dataclasses.replace(cfg, fit=fit)


def run_simulation(cfg: RunConfig) -> dict[Group, BatchResult]:
    out = {}
    for group in cfg.plan.groups:
        out[group] = simulate_group(
            group, cfg.scenario, cfg.responder_for(group),
            n_participants=cfg.plan.participants, seed=cfg.plan.seed,
            gaze=cfg.gaze_policy(), params=cfg.attention, dt=cfg.dt,
            gains=cfg.plan.gains, repetitions=cfg.plan.repetitions,
        )
    return out


def _write_simulation(cfg: RunConfig, results: dict[Group, BatchResult], outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    records = [r for res in results.values() for r in res.records]
    write_summary_csv(records, outdir / "summary.csv")
    if cfg.write_frames:
        trials = outdir / "trials"
        trials.mkdir(exist_ok=True)
        traces = [t for res in results.values() for t in res.traces]
        for i, trace in enumerate(traces):
            write_frames_csv(trace, trials / f"trial_{i:05d}.csv")
    (outdir / "config.json").write_text(cfg.dumps())


def _report_simulation(results: dict[Group, BatchResult]) -> None:
    for group, res in results.items():
        print(f"{group.value}: {len(res.records)} trials, {res.excluded} excluded "
              f"(max gain not reached), {sum(r.bounds_violation for r in res.records)} out of bounds")
    dyn = results.get(Group.WITH_DISTRACTOR)
    if dyn is not None:
        try:
            s = t1_statistics(dyn.records)
        except EmptyStatisticsError:
            print("t1: no trial reached the maximum gain")
        else:
            print(f"t1 [s]: n={s.count} min={s.min:.3f} max={s.max:.3f} median={s.median:.3f} "
                  f"mean={s.mean:.3f} sd={s.sd:.3f}")


def cmd_simulate(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    outdir = Path(cfg.resolved_output_dir(args.output_dir))
    results = run_simulation(cfg)
    _write_simulation(cfg, results, outdir)
    _report_simulation(results)
    print(f"wrote {outdir / 'summary.csv'}")
    return EXIT_OK


def plot_rows(data: ResponseDataset, fit: PsyFit) -> list[tuple]:
    """Rows ``(kind, gain, empirical_proportion, fitted_psi)`` for drawing the curve.

    ``curve`` rows sample the fit on 200 points over [0.5, 1.5]; ``data``
    rows carry the empirical proportions; ``ldt``/``pse``/``udt`` mark the
    thresholds.
    """
    rows = []
    grid = np.linspace(*PLOT_RANGE, PLOT_POINTS)
    for g, psi in zip(grid, psychometric_value(grid, fit.params)):
        rows.append(("curve", float(g), None, float(psi)))
    for lv, psi in zip(data.levels, psychometric_value(data.x, fit.params)):
        rows.append(("data", lv.x, lv.k / lv.n, float(psi)))
    for kind, x in (("ldt", fit.ldt), ("pse", fit.pse), ("udt", fit.udt)):
        rows.append((kind, float(x), None, float(psychometric_value(x, fit.params))))
    return rows


def _write_fit(data: ResponseDataset, fit: PsyFit, json_path: Path, plot_path: Path) -> None:
    json_path.write_text(json.dumps(fit.to_dict(), indent=2) + "\n")
    with open(plot_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("kind", "gain", "empirical_proportion", "fitted_psi"))
        for kind, g, emp, psi in plot_rows(data, fit):
            w.writerow((kind, format_cell(g), format_cell(emp), format_cell(psi)))


def cmd_fit(args) -> int:
    data = read_dataset_csv(args.dataset, group=args.group)
    fit = fit_psychometric(data, args.fix_gamma, args.fix_lambda, n_boot=args.n_boot,
                           ci_level=args.ci_level, seed=args.seed)
    outdir = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    stem = args.name
    _write_fit(data, fit, outdir / f"{stem}.json", outdir / f"{stem}_plot.csv")
    ci = fit.pse_ci
    print(f"alpha={fit.params.alpha:.4f} beta={fit.params.beta:.4f}")
    print(f"LDT={fit.ldt:.3f} PSE={fit.pse:.3f} UDT={fit.udt:.3f} AIC={fit.aic:.1f} SSE={fit.sse:.4f}"
          + (f" PSE CI=[{ci[0]:.3f}, {ci[1]:.3f}]" if ci else ""))
    print(f"wrote {outdir / (stem + '.json')}")
    return EXIT_OK


def pipeline_table(cfg: RunConfig, results: dict[Group, BatchResult]) -> list[dict]:
    """Fit every group and return one table row per group."""
    rows = []
    for group, res in results.items():
        data = res.dataset
        if data is None:
            raise FitDegenerateError(f"{group.value}: every trial was excluded")
        fit = fit_psychometric(data, cfg.fit.fix_gamma, cfg.fit.fix_lambda, n_boot=cfg.fit.n_boot,
                               ci_level=cfg.fit.ci_level, seed=cfg.plan.seed)
        ci = fit.pse_ci or (None, None)
        rows.append({
            "group": group.value, "n_trials": len(res.included), "excluded": res.excluded,
            "ldt": fit.ldt, "pse": fit.pse, "udt": fit.udt, "aic": fit.aic, "sse": fit.sse,
            "ci_low": ci[0], "ci_high": ci[1], "alpha": fit.params.alpha, "beta": fit.params.beta,
            "converged": fit.converged, "_fit": fit, "_data": data,
        })
    return rows


def cmd_pipeline(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    outdir = Path(cfg.resolved_output_dir(args.output_dir))
    results = run_simulation(cfg)
    _write_simulation(cfg, results, outdir)
    _report_simulation(results)
    rows = pipeline_table(cfg, results)
    for row in rows:
        _write_fit(row["_data"], row["_fit"], outdir / f"fit_{row['group']}.json",
                   outdir / f"plot_{row['group']}.csv")
        write_counts_csv(row["_data"], outdir / f"counts_{row['group']}.csv")
    with open(outdir / "thresholds.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for row in rows:
            w.writerow([format_cell(row[c]) for c in TABLE_COLUMNS])
    print(f"{'group':<20}{'LDT':>7}{'PSE':>7}{'UDT':>7}{'AIC':>9}{'SSE':>8}  PSE CI")
    for r in rows:
        ci = f"[{r['ci_low']:.3f}, {r['ci_high']:.3f}]" if r["ci_low"] is not None else "-"
        print(f"{r['group']:<20}{r['ldt']:7.3f}{r['pse']:7.3f}{r['udt']:7.3f}{r['aic']:9.1f}{r['sse']:8.4f}  {ci}")
    print(f"wrote {outdir / 'thresholds.csv'}")
    return EXIT_OK


def cmd_sequence(args) -> int:
    seeds = [args.seed + i for i in range(args.count)]
    gains = tuple(args.gains) if args.gains else DEFAULT_GAINS
    text = json.dumps(sequence_table(seeds, gains, args.reps), indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.count} sequences to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_chisq(args) -> int:
    res = chi_square_2x2([[args.a, args.b], [args.c, args.d]])
    n = args.a + args.b + args.c + args.d
    print(f"chi2({res.df}, N = {n}) = {res.statistic:.3f}, p = {res.p_value:.4f}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse's own code 2 would read as I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rdwlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def sim_flags(sp):
        sp.add_argument("--config", help="JSON run config")
        sp.add_argument("--seed", type=int, help="override plan.seed")
        sp.add_argument("--group", action="append", choices=[g.value for g in Group],
                        help="restrict to a group (repeatable)")
        sp.add_argument("--participants", type=int, help="override plan.participants")
        sp.add_argument("--output-dir", help=f"output directory (default: config, then ${OUTPUT_DIR_ENV})")
        sp.add_argument("--no-frames", action="store_true", help="skip per-frame trial CSVs")

    sp = sub.add_parser("simulate", help="run the trial batch and write CSV logs")
    sim_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("fit", help="fit a psychometric curve to a dataset CSV")
    sp.add_argument("dataset", help="gain,n,k CSV or a batch summary.csv")
    sp.add_argument("--group", choices=[g.value for g in Group], help="group filter for summary files")
    sp.add_argument("--fix-gamma", type=float, default=None)
    sp.add_argument("--fix-lambda", type=float, default=None)
    sp.add_argument("--n-boot", type=int, default=1000, help="bootstrap replicates (0 disables the CI)")
    sp.add_argument("--ci-level", type=float, default=0.95)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output-dir")
    sp.add_argument("--name", default="fit", help="output file stem")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("pipeline", help="simulate, fit each group, write the threshold table")
    sim_flags(sp)
    sp.add_argument("--n-boot", type=int, help="override fit.n_boot")
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("sequence", help="emit Fisher-Yates gain sequences")
    sp.add_argument("--seed", type=int, default=0, help="first seed; sequence i uses seed + i")
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--reps", type=int, default=DEFAULT_REPETITIONS)
    sp.add_argument("--gains", type=float, nargs="+")
    sp.add_argument("--output", help="write JSON here instead of stdout")
    sp.set_defaults(func=cmd_sequence)

    sp = sub.add_parser("chisq", help="2x2 chi-square test: rdwlab chisq A B C D")
    for name in "abcd":
        sp.add_argument(name, type=int)
    sp.set_defaults(func=cmd_chisq)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FitDegenerateError, CIUnreliableError) as exc:
        print(f"rdwlab: analysis degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except OSError as exc:
        print(f"rdwlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, RdwError, ValueError) as exc:
        print(f"rdwlab: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
