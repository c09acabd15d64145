# %% [markdown]
# # Fitting a psychometric curve
#
# Observers answer whether the virtual world moved faster ("Greater") or
# slower ("Smaller") than their own walking.  The proportion of "Greater"
# answers rises with the gain; a cumulative normal fitted by maximum
# likelihood gives the gains where that proportion is 25%, 50% and 75%.

# %%
import numpy as np

from rdwlab import PsyParams, ResponseDataset, fit_psychometric, psychometric_value, thresholds

gains = np.round(np.arange(0.5, 1.51, 0.1), 1)
truth = PsyParams(alpha=1.03, beta=5.62)
print("true LDT/PSE/UDT:", np.round(thresholds(truth), 3))

# %% [markdown]
# 26 observers times 5 repetitions gives 130 answers per gain level.

# %%
rng = np.random.default_rng(1)
n = np.full(gains.size, 130)
k = rng.binomial(n, psychometric_value(gains, truth))
data = ResponseDataset.from_counts(gains, n, k)
for lv in data.levels:
    print(f"  gain {lv.x:.1f}: {lv.k:3d}/{lv.n} greater")

# %%
fit = fit_psychometric(data, n_boot=500, seed=1)
print(f"alpha={fit.params.alpha:.3f} beta={fit.params.beta:.2f}")
print(f"LDT={fit.ldt:.3f} PSE={fit.pse:.3f} UDT={fit.udt:.3f}")
print(f"PSE 95% CI: [{fit.pse_ci[0]:.3f}, {fit.pse_ci[1]:.3f}]")
print(f"AIC={fit.aic:.1f} SSE={fit.sse:.4f}")

# %% [markdown]
# Allowing for lapses changes the likelihood.  Fixing a 2% lapse rate at
# both ends and comparing AIC shows whether the data ask for it.

# %%
lapse = fit_psychometric(data, fix_gamma=0.02, fix_lambda=0.02)
print(f"no lapses AIC={fit.aic:.1f}   2% lapses AIC={lapse.aic:.1f}")
