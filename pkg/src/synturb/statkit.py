"""Power-law fits, curve distances and two-sample tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .rng import stream

__all__ = [
    "FitError",
    "PowerLawFit",
    "ConvergenceTrace",
    "fit_power_law",
    "curve_distance",
    "convergence_trace",
    "TwoSampleResult",
    "two_sample_match",
    "ks_statistic",
]

MIN_FIT_POINTS = 8
CI_LEVEL = 0.95
SIGMA_PASS = 3.0


class FitError(ValueError):
    pass


@dataclass
class PowerLawFit:
    exponent: float
    prefactor: float
    ci: float  # 95% half-width on the exponent
    window: tuple
    max_log_residual: float
    n_points: int

    def contains(self, value: float) -> bool:
        return abs(self.exponent - value) <= self.ci

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "ci95": self.ci,
            "window": list(self.window),
            "max_log_residual": self.max_log_residual,
            "n_points": self.n_points,
        }


def fit_power_law(t, y, stderr=None, window: Optional[Sequence[float]] = None) -> PowerLawFit:
    """Weighted least squares of ``log y = log c + p log t`` inside ``window``.

    Weights are ``(y / stderr)^2`` (the delta-method variance of ``log y``);
    without errors, or when every error is zero, the fit is unweighted.  The
    CI uses the Student-t quantile with the weighted residual scale, so a
    perfect power law gives a zero-width interval.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        window = (t.min(), t.max())
    lo, hi = float(window[0]), float(window[1])
    sel = (t >= lo) & (t <= hi) & (t > 0)
    n = int(sel.sum())
    if n < MIN_FIT_POINTS:
        raise FitError(f"fit window [{lo:g}, {hi:g}] holds {n} points, need >= {MIN_FIT_POINTS}")
    if np.any(y[sel] <= 0):
        raise FitError("power-law fit needs y > 0 in the window")
    lx, ly = np.log(t[sel]), np.log(y[sel])
    if stderr is not None and np.all(np.asarray(stderr, dtype=float)[sel] > 0):
        s = np.asarray(stderr, dtype=float)[sel] / y[sel]
        w = 1.0 / s**2
    else:
        w = np.ones(n)
    w = w / w.sum()
    mx, my = np.sum(w * lx), np.sum(w * ly)
    sxx = np.sum(w * (lx - mx) ** 2)
    if sxx == 0:
        raise FitError("fit window spans a single abscissa")
    slope = np.sum(w * (lx - mx) * (ly - my)) / sxx
    icpt = my - slope * mx
    res = ly - (icpt + slope * lx)
    # weighted residual variance with n - 2 degrees of freedom
    s2 = np.sum(w * res**2) * n / (n - 2)
    se = math.sqrt(s2 / (n * sxx))
    half = float(stats.t.ppf(0.5 + CI_LEVEL / 2, n - 2) * se)
    return PowerLawFit(
        exponent=float(slope),
        prefactor=float(math.exp(icpt)),
        ci=half,
        window=(float(t[sel].min()), float(t[sel].max())),
        max_log_residual=float(np.max(np.abs(res))),
        n_points=n,
    )


def curve_distance(t_a, y_a, t_b, y_b, window: Optional[Sequence[float]] = None,
                   n_grid: int = 400) -> float:
    """Root-mean-square log ratio of two positive curves over log time.

    Both curves are interpolated linearly in ``(log t, log y)`` on a common
    grid spanning the shared window.
    """
    t_a, y_a = np.asarray(t_a, float), np.asarray(y_a, float)
    t_b, y_b = np.asarray(t_b, float), np.asarray(y_b, float)
    ma, mb = t_a > 0, t_b > 0
    t_a, y_a, t_b, y_b = t_a[ma], y_a[ma], t_b[mb], y_b[mb]
    lo = max(t_a.min(), t_b.min())
    hi = min(t_a.max(), t_b.max())
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    if not hi > lo:
        raise ValueError("curves share no time window")
    if np.any(y_a <= 0) or np.any(y_b <= 0):
        raise ValueError("curve_distance needs positive curves")
    g = np.linspace(math.log(lo), math.log(hi), n_grid)
    la = np.interp(g, np.log(t_a), np.log(y_a))
    lb = np.interp(g, np.log(t_b), np.log(y_b))
    diff2 = (la - lb) ** 2
    integral = np.sum(0.5 * (diff2[1:] + diff2[:-1]) * np.diff(g))
    return float(math.sqrt(integral / (g[-1] - g[0])))


@dataclass
class ConvergenceTrace:
    epsilons: list
    distances: list
    monotone: bool
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"epsilons": list(self.epsilons), "distances": list(self.distances),
                "monotone": self.monotone}


def convergence_trace(epsilons, distances) -> ConvergenceTrace:
    """Verdict on strict decrease of ``distances`` as ``epsilons`` shrink."""
    eps = [float(e) for e in epsilons]
    dist = [float(d) for d in distances]
    if len(eps) != len(dist):
        raise ValueError("one distance per epsilon")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    if not all(math.isfinite(d) for d in dist):
        raise ValueError("distances must be finite")
    mono = all(b < a for a, b in zip(dist, dist[1:]))
    return ConvergenceTrace(eps, dist, mono)


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov distance ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


@dataclass
class TwoSampleResult:
    statistic: float
    threshold: float
    null_mean: float
    null_std: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(statistic=self.statistic, threshold=self.threshold,
                    null_mean=self.null_mean, null_std=self.null_std, passed=self.passed)


def two_sample_match(a, b, *, n_perm: int = 200, seed: int = 0) -> TwoSampleResult:
    """KS distance against a permutation null; pass below ``mean + 3 sd``."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    d = ks_statistic(a, b)
    pool = np.concatenate([a, b])
    rng = stream(seed, "permutation")
    null = np.empty(n_perm)
    for i in range(n_perm):
        perm = rng.permutation(pool)
        null[i] = ks_statistic(perm[: a.size], perm[a.size:])
    mu, sd = float(null.mean()), float(null.std(ddof=1))
    thr = mu + SIGMA_PASS * sd
    return TwoSampleResult(d, thr, mu, sd, bool(d <= thr))
