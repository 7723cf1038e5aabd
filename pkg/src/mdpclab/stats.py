"""Regression and correlation estimators for campaign logs.

fit_linear is plain (optionally weighted) ordinary least squares;
fit_theta_binned first averages the response within each integer theta value
and weights the bins by their trial counts, which reproduces the binned
scatter the slope targets refer to (and equals the raw per-trial OLS slope).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    residual_std: float
    n: int
    correlation: float


def fit_linear(xs, ys, weights=None) -> RegressionFit:
    """Least-squares line through (xs, ys); raises on degenerate xs."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have equal length")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    w = np.ones_like(xs) if weights is None else np.asarray(weights, dtype=float)
    xm = np.average(xs, weights=w)
    ym = np.average(ys, weights=w)
    varx = np.average((xs - xm) ** 2, weights=w)
    if varx == 0:
        raise ValueError("xs are constant; no slope is defined")
    vary = np.average((ys - ym) ** 2, weights=w)
    cov = np.average((xs - xm) * (ys - ym), weights=w)
    slope = cov / varx
    intercept = ym - slope * xm
    resid = ys - (slope * xs + intercept)
    residual_std = float(np.sqrt(np.average(resid ** 2, weights=w)))
    correlation = float(cov / np.sqrt(varx * vary)) if vary > 0 else 1.0
    return RegressionFit(
        slope=float(slope),
        intercept=float(intercept),
        residual_std=residual_std,
        n=len(xs),
        correlation=correlation,
    )


def fit_theta_binned(theta, ys) -> RegressionFit:
    """OLS on per-theta mean responses, bins weighted by their trial counts."""
    theta = np.asarray(theta)
    ys = np.asarray(ys, dtype=float)
    values, inverse, counts = np.unique(theta, return_inverse=True, return_counts=True)
    sums = np.bincount(inverse, weights=ys)
    return fit_linear(values.astype(float), sums / counts, weights=counts)


def best_combo_correlation(err_crt, err_gen, iters, grid=None):
    """Search lambda maximizing |corr(ErrCrt - lambda * ErrGen, iterations)|.

    Returns (best_lambda, lambdas, correlations) with signed correlations;
    comparison is on magnitudes.
    """
    err_crt = np.asarray(err_crt, dtype=float)
    err_gen = np.asarray(err_gen, dtype=float)
    iters = np.asarray(iters, dtype=float)
    if grid is None:
        grid = np.arange(0.0, 4.0 + 1e-9, 0.05)
    grid = np.asarray(grid, dtype=float)
    if iters.std() == 0:
        raise ValueError("iteration counts are constant; correlation undefined")
    corrs = np.empty(len(grid))
    for i, lam in enumerate(grid):
        combo = err_crt - lam * err_gen
        if combo.std() == 0:
            corrs[i] = 0.0
            continue
        corrs[i] = np.corrcoef(combo, iters)[0, 1]
    best = grid[int(np.argmax(np.abs(corrs)))]
    return float(best), grid, corrs


@dataclass(frozen=True)
class ShiftEstimate:
    value: float
    stderr: float
    trials: int


def spectrum_shift(params, trials: int, seed) -> ShiftEstimate:
    """Monte-Carlo E[De_d | De_d != 0] - E[De_d] for attack errors.

    Samples weight-t supports on the k block, pools multiplicities across all
    distances, and reports the conditional-minus-unconditional mean with the
    standard error of the conditional part (the dominant noise term).
    """
    k, t = params.k, params.t
    D = k // 2
    rng = np.random.default_rng(seed)
    nonzero = 0
    cond_sum = 0
    cond_sumsq = 0
    for _ in range(trials):
        supp = rng.choice(k, size=t, replace=False)
        d = np.abs(supp[:, None] - supp[None, :])
        d = np.minimum(d, k - d)
        iu = np.triu_indices(t, 1)
        counts = np.bincount(d[iu], minlength=D + 1)[1:]
        hits = counts[counts > 0]
        nonzero += len(hits)
        cond_sum += int(hits.sum())
        cond_sumsq += int((hits ** 2).sum())
    uncond = comb(t, 2) / D  # exact: every pair lands on some distance
    cond_mean = cond_sum / nonzero
    cond_var = cond_sumsq / nonzero - cond_mean ** 2
    stderr = float(np.sqrt(max(cond_var, 0.0) / nonzero))
    return ShiftEstimate(value=float(cond_mean - uncond), stderr=stderr, trials=trials)
