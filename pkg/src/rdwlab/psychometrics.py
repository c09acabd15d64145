"""Psychometric analysis of "Greater"/"Smaller" gain judgements.

The model is the usual four-parameter psychometric function

    psi(x) = gamma + (1 - gamma - lambda) * Phi(beta * (x - alpha))

fitted to per-level binomial counts by maximum likelihood.  Thresholds are
read off analytically: LDT, PSE and UDT are the gains where psi crosses
0.25, 0.5 and 0.75.

The binomial coefficient in the likelihood does not depend on the
parameters, so :func:`neg_log_likelihood` leaves it out.  AIC values are
therefore on the Bernoulli scale and only comparable between fits that use
the same convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy import optimize, special, stats

from .errors import (
    CIUnreliableError,
    FitDegenerateError,
    ParameterError,
    ThresholdUndefinedError,
    UndefinedTestError,
)

__all__ = [
    "Level",
    "ResponseDataset",
    "PsyParams",
    "PsyFit",
    "Thresholds",
    "ChiSquare",
    "cumulative_normal",
    "psychometric_value",
    "neg_log_likelihood",
    "nll_counts",
    "is_identifiable",
    "fit_psychometric",
    "thresholds",
    "inverse_psychometric",
    "aic",
    "sse",
    "bootstrap_ci",
    "chi_square_2x2",
    "PSI_EPS",
]

PSI_EPS = 1e-12


class Level(NamedTuple):
    x: float
    n: int
    k: int


@dataclass(frozen=True)
class ResponseDataset:
    """Per-stimulus counts: ``n`` presentations and ``k`` "Greater" answers at gain ``x``."""

    levels: tuple[Level, ...]

    def __post_init__(self):
        levels = tuple(Level(float(x), int(n), int(k)) for x, n, k in self.levels)
        if not levels:
            raise ParameterError("dataset has no levels")
        for lv in levels:
            if lv.n < 1 or not 0 <= lv.k <= lv.n:
                raise ParameterError(f"invalid counts at x={lv.x}: n={lv.n}, k={lv.k}")
        xs = [lv.x for lv in levels]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ParameterError("levels must be sorted by x with distinct x values")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def from_counts(cls, x, n, k) -> "ResponseDataset":
        """Build from parallel arrays; levels are sorted by ``x``."""
        rows = sorted(zip(np.asarray(x, float).tolist(), np.asarray(n).tolist(), np.asarray(k).tolist()))
        return cls(tuple(rows))

    @classmethod
    def from_trials(cls, gains: Sequence[float], greater: Sequence[bool], decimals: int = 6) -> "ResponseDataset":
        """Aggregate single-trial responses; gains are rounded to ``decimals`` before grouping."""
        if len(gains) != len(greater):
            raise ParameterError("gains and responses differ in length")
        counts: dict[float, list[int]] = {}
        for g, r in zip(gains, greater):
            c = counts.setdefault(round(float(g), decimals), [0, 0])
            c[0] += 1
            c[1] += bool(r)
        return cls(tuple(Level(x, n, k) for x, (n, k) in sorted(counts.items())))

    @property
    def x(self) -> np.ndarray:
        return np.array([lv.x for lv in self.levels])

    @property
    def n(self) -> np.ndarray:
        return np.array([lv.n for lv in self.levels])

    @property
    def k(self) -> np.ndarray:
        return np.array([lv.k for lv in self.levels])

    @property
    def proportions(self) -> np.ndarray:
        return self.k / self.n

    def __len__(self):
        return len(self.levels)


@dataclass(frozen=True)
class PsyParams:
    """Position ``alpha``, scale ``beta`` and the two asymptote parameters."""

    alpha: float
    beta: float
    gamma: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")
        if self.gamma < 0 or self.lam < 0 or self.gamma + self.lam >= 1:
            raise ParameterError(f"need gamma, lambda >= 0 and gamma + lambda < 1, got {self.gamma}, {self.lam}")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "lambda": self.lam}

    @classmethod
    def from_dict(cls, d: dict) -> "PsyParams":
        return cls(float(d["alpha"]), float(d["beta"]), float(d.get("gamma", 0.0)), float(d.get("lambda", 0.0)))


class Thresholds(NamedTuple):
    ldt: float
    pse: float
    udt: float


@dataclass(frozen=True)
class PsyFit:
    params: PsyParams
    nll: float
    aic: float
    sse: float
    pse: float
    ldt: float
    udt: float
    pse_ci: tuple[float, float] | None
    converged: bool
    n_free: int = 2

    def to_dict(self) -> dict:
        """JSON-ready report."""
        return {
            "params": self.params.to_dict(),
            "nll": self.nll,
            "aic": self.aic,
            "sse": self.sse,
            "pse": self.pse,
            "ldt": self.ldt,
            "udt": self.udt,
            "pse_ci": list(self.pse_ci) if self.pse_ci is not None else None,
            "converged": self.converged,
        }


def cumulative_normal(x, alpha: float, beta: float):
    """Normal CDF with mean ``alpha`` and standard deviation ``1/beta``."""
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    return special.ndtr(beta * (np.asarray(x, dtype=float) - alpha))


def psychometric_value(x, p: PsyParams):
    if not isinstance(p, PsyParams):
        raise ParameterError(f"expected PsyParams, got {type(p).__name__}")
    return p.gamma + (1.0 - p.gamma - p.lam) * cumulative_normal(x, p.alpha, p.beta)


def nll_counts(x, n, k, p: PsyParams) -> float:
    """Bernoulli-form negative log-likelihood on raw arrays (duplicate ``x`` allowed)."""
    psi = np.clip(psychometric_value(x, p), PSI_EPS, 1.0 - PSI_EPS)
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    return float(-np.sum(k * np.log(psi) + (n - k) * np.log1p(-psi)))


def neg_log_likelihood(data: ResponseDataset, p: PsyParams) -> float:
    return nll_counts(data.x, data.n, data.k, p)


def sse(data: ResponseDataset, p: PsyParams) -> float:
    """Sum of squared differences between empirical proportions and the curve."""
    return float(np.sum((data.proportions - psychometric_value(data.x, p)) ** 2))


def inverse_psychometric(prob: float, p: PsyParams) -> float:
    """Gain at which psi equals ``prob``."""
    q = (prob - p.gamma) / (1.0 - p.gamma - p.lam)
    if not 0.0 < q < 1.0:
        raise ThresholdUndefinedError(
            f"probability {prob} is outside the curve's range ({p.gamma}, {1 - p.lam})")
    return p.alpha + float(special.ndtri(q)) / p.beta


def thresholds(p: PsyParams) -> Thresholds:
    """LDT, PSE and UDT: the gains where psi is 0.25, 0.5 and 0.75."""
    return Thresholds(*(inverse_psychometric(q, p) for q in (0.25, 0.5, 0.75)))


def aic(fit: PsyFit, n_free_params: int = 2) -> float:
    if not fit.converged:
        raise ParameterError("AIC requested for a fit that did not converge")
    return 2.0 * n_free_params + 2.0 * fit.nll


def is_identifiable(data: ResponseDataset) -> bool:
    """True when the responses overlap, so the likelihood has a finite maximiser.

    Overlap means some "Greater" answer sits at a strictly lower gain than
    some "Smaller" answer.  All-zero, all-one and step-shaped datasets fail.
    """
    x, n, k = data.x, data.n, data.k
    has_greater = k > 0
    has_smaller = k < n
    if not has_greater.any() or not has_smaller.any():
        return False
    return bool(x[has_greater].min() < x[has_smaller].max())


def _initial_alpha(data: ResponseDataset) -> float:
    x, p = data.x, data.proportions
    for i in range(len(x) - 1):
        a, b = p[i] - 0.5, p[i + 1] - 0.5
        if a == 0.0:
            return float(x[i])
        if a * b < 0:
            return float(x[i] + (x[i + 1] - x[i]) * (-a) / (b - a))
    return float(x[np.argmin(np.abs(p - 0.5))])


def _minimize(data, gamma, lam, starts):
    """Nelder-Mead over (scaled alpha, log scaled beta); returns (params, nll, converged)."""
    x = data.x.astype(float)
    n = data.n.astype(float)
    k = data.k.astype(float)
    centre = 0.5 * float(x.max() + x.min())
    width = max(float(x.max() - x.min()), 1e-6)
    span = 1.0 - gamma - lam

    def objective(theta):
        alpha = centre + theta[0] * width
        beta = math.exp(min(theta[1], 50.0)) / width
        psi = gamma + span * special.ndtr(beta * (x - alpha))
        psi = np.clip(psi, PSI_EPS, 1.0 - PSI_EPS)
        return -float(np.dot(k, np.log(psi)) + np.dot(n - k, np.log1p(-psi)))

    best = None
    for alpha0, beta0 in starts:
        theta0 = np.array([(alpha0 - centre) / width, math.log(beta0 * width)])
        res = optimize.minimize(objective, theta0, method="Nelder-Mead",
                                options={"xatol": 1e-7, "fatol": 1e-10, "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
    alpha = float(centre + best.x[0] * width)
    beta = math.exp(float(best.x[1])) / width
    return PsyParams(alpha, beta, gamma, lam), float(best.fun), bool(best.success)


def fit_psychometric(
    data: ResponseDataset,
    fix_gamma: float | None = None,
    fix_lambda: float | None = None,
    *,
    n_boot: int = 0,
    ci_level: float = 0.95,
    seed: int = 0,
    restarts: int = 5,
) -> PsyFit:
    """Maximum-likelihood fit of alpha and beta with the asymptotes held fixed.

    The first start puts alpha at the interpolated 50% crossing of the
    empirical proportions and beta at ``2 / (x_max - x_min)``; the remaining
    ``restarts - 1`` starts jitter that point with a fixed-seed generator, so
    the fit itself is deterministic.  The best of all runs is kept.

    With ``n_boot > 0`` a parametric bootstrap CI for the PSE is attached
    (see :func:`bootstrap_ci`); otherwise ``pse_ci`` is None.
    """
    gamma = 0.0 if fix_gamma is None else float(fix_gamma)
    lam = 0.0 if fix_lambda is None else float(fix_lambda)
    PsyParams(1.0, 1.0, gamma, lam)  # validates the asymptotes
    if not is_identifiable(data):
        raise FitDegenerateError(
            "responses do not overlap across gain levels (all 'Smaller', all 'Greater' "
            "or a perfect step); the psychometric curve is not identifiable")

    x = data.x
    alpha0 = _initial_alpha(data)
    beta0 = 2.0 / max(x.max() - x.min(), 1e-6)
    jitter = np.random.default_rng(0)
    width = x.max() - x.min()
    starts = [(alpha0, beta0)]
    for _ in range(max(restarts, 1) - 1):
        starts.append((alpha0 + 0.15 * width * jitter.normal(),
                       beta0 * math.exp(0.7 * jitter.normal())))
    params, nll, converged = _minimize(data, gamma, lam, starts)
    return _make_fit(data, params, nll, converged, n_boot=n_boot, ci_level=ci_level, seed=seed)


def _make_fit(data, params, nll, converged, n_boot=0, ci_level=0.95, seed=0) -> PsyFit:
    try:
        ldt, pse, udt = thresholds(params)
    except ThresholdUndefinedError:
        ldt = udt = math.nan
        pse = inverse_psychometric(0.5, params) if params.gamma < 0.5 < 1 - params.lam else math.nan
    fit = PsyFit(
        params=params,
        nll=nll,
        aic=4.0 + 2.0 * nll,
        sse=sse(data, params),
        pse=pse,
        ldt=ldt,
        udt=udt,
        pse_ci=None,
        converged=converged,
    )
    if n_boot:
        lo, hi = bootstrap_ci(data, fit, n_boot=n_boot, seed=seed, level=ci_level)
        fit = replace(fit, pse_ci=(lo, hi))
    return fit


def bootstrap_ci(
    data: ResponseDataset,
    fit: PsyFit,
    n_boot: int = 1000,
    seed: int = 0,
    level: float = 0.95,
) -> tuple[float, float]:
    """Parametric-bootstrap percentile interval for the PSE.

    Replicate ``i`` draws ``k ~ Binomial(n, psi_fit(x))`` at every level
    from ``np.random.default_rng([seed, i])`` and refits from the point
    estimate.  Replicates whose data are not identifiable are dropped; more
    than 20% dropped raises :class:`CIUnreliableError`.
    """
    if not fit.converged:
        raise ParameterError("bootstrap requires a converged fit")
    if n_boot < 100:
        raise ParameterError(f"n_boot must be at least 100, got {n_boot}")
    if not 0 < level < 1:
        raise ParameterError(f"level must lie in (0, 1), got {level}")
    p = fit.params
    x, n = data.x, data.n
    psi = psychometric_value(x, p)
    start = [(p.alpha, p.beta)]
    pses = []
    failed = 0
    for i in range(n_boot):
        rng = np.random.default_rng([seed, i])
        k = rng.binomial(n, psi)
        boot = ResponseDataset.from_counts(x, n, k)
        if not is_identifiable(boot):
            failed += 1
            continue
        bp, _, ok = _minimize(boot, p.gamma, p.lam, start)
        if not ok:
            failed += 1
            continue
        pses.append(inverse_psychometric(0.5, bp))
    if failed > 0.2 * n_boot:
        raise CIUnreliableError(f"{failed} of {n_boot} bootstrap refits were degenerate")
    tail = 100.0 * (1.0 - level) / 2.0
    lo, hi = np.percentile(pses, [tail, 100.0 - tail])
    return float(lo), float(hi)


class ChiSquare(NamedTuple):
    statistic: float
    df: int

    @property
    def p_value(self) -> float:
        return float(stats.chi2.sf(self.statistic, self.df))


def chi_square_2x2(table) -> ChiSquare:
    """Pearson chi-square for a 2x2 contingency table, no continuity correction."""
    t = np.asarray(table, dtype=float)
    if t.shape != (2, 2):
        raise UndefinedTestError(f"expected a 2x2 table, got shape {t.shape}")
    if (t < 0).any():
        raise UndefinedTestError("counts must be non-negative")
    (a, b), (c, d) = t
    margins = (a + b) * (c + d) * (a + c) * (b + d)
    if margins == 0:
        raise UndefinedTestError("a row or column total is zero")
    total = a + b + c + d
    return ChiSquare(float(total * (a * d - b * c) ** 2 / margins), 1)
