# %% [markdown]
# # Three groups, end to end
#
# The same pipeline the `rdwlab pipeline` command runs, driven from
# Python.  Each group gets its own synthetic observer; the distractor
# group is given a flatter curve.

# %%
from rdwlab import Group, t1_statistics
from rdwlab.cli import pipeline_table, run_simulation
from rdwlab.config import RunConfig

# the same dict could live in a JSON file passed as --config
cfg = RunConfig.from_dict({
    "plan": {"seed": 3, "participants": 26},
    "responders": {
        "with_distractor": {"alpha": 1.08, "beta": 2.81},
        "without_distractor": {"alpha": 1.03, "beta": 5.62},
        "switch": {"alpha": 1.02, "beta": 6.74},
    },
    "gaze": [{"name": "linear_turn_uniform", "low": 0.05, "high": 0.6}],
    "fit": {"n_boot": 300},
})
results = run_simulation(cfg)

# %% [markdown]
# Ascent durations vary with each trial's head turn.

# %%
s = t1_statistics(results[Group.WITH_DISTRACTOR].records)
print(f"t1: n={s.count} min={s.min:.3f} median={s.median:.3f} max={s.max:.3f} s")

# %%
rows = pipeline_table(cfg, results)
print(f"{'group':<20}{'LDT':>7}{'PSE':>7}{'UDT':>7}   PSE CI")
for r in rows:
    print(f"{r['group']:<20}{r['ldt']:7.3f}{r['pse']:7.3f}{r['udt']:7.3f}   "
          f"[{r['ci_low']:.3f}, {r['ci_high']:.3f}]")
