"""Empirical-distribution utilities shared by the experiments.

Kolmogorov-Smirnov statistics are computed exactly from sorted samples and
paired with hard Dvoretzky-Kiefer-Wolfowitz thresholds, so experiment
verdicts never depend on asymptotic p-value tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EmpiricalSample",
    "ks_two_sample",
    "ks_one_sample_exponential",
    "dkw_threshold",
    "loglog_slope",
]


@dataclass(frozen=True)
class EmpiricalSample:
    """A sample with a cached ascending view."""

    values: np.ndarray
    sorted_view: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sorted_view", np.sort(v))

    def __len__(self) -> int:
        return self.values.size


def _sorted(sample) -> np.ndarray:
    if isinstance(sample, EmpiricalSample):
        return sample.sorted_view
    return np.sort(np.asarray(sample, dtype=float).ravel())


def ks_two_sample(a, b) -> float:
    """Exact sup_x |F_a(x) - F_b(x)| between two ECDFs.

    Ties are handled by evaluating both right-continuous ECDFs at every
    pooled sample point (searchsorted side="right").
    """
    xa, xb = _sorted(a), _sorted(b)
    if xa.size == 0 or xb.size == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, pooled, side="right") / xa.size
    fb = np.searchsorted(xb, pooled, side="right") / xb.size
    return float(np.max(np.abs(fa - fb)))


def ks_one_sample_exponential(a, rate: float) -> float:
    """Exact KS distance between a sample's ECDF and Exp(rate)."""
    if rate <= 0.0:
        raise ValueError("rate must be positive")
    x = _sorted(a)
    if x.size == 0:
        raise ValueError("sample must be nonempty")
    if x[0] < 0.0:
        raise ValueError("negative values present; Exp support is [0, inf)")
    n = x.size
    cdf = 1.0 - np.exp(-rate * x)
    d_plus = np.max(np.arange(1, n + 1) / n - cdf)
    d_minus = np.max(cdf - np.arange(0, n) / n)
    return float(max(d_plus, d_minus))


def dkw_threshold(n: int, m: int, alpha_level: float) -> float:
    """Two-sample DKW rejection threshold at the given level."""
    if n < 1 or m < 1:
        raise ValueError("sample sizes must be >= 1")
    if not (0.0 < alpha_level < 1.0):
        raise ValueError("alpha_level must lie in (0, 1)")
    return math.sqrt(-math.log(alpha_level / 2.0) * (n + m) / (2.0 * n * m))


def loglog_slope(xs, ys) -> float:
    """OLS slope of log(ys) against log(xs)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise ValueError("xs and ys must have equal length")
    if x.size < 4:
        raise ValueError("need at least 4 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("all entries must be positive")
    lx, ly = np.log(x), np.log(y)
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))
