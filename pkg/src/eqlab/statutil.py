"""Small statistics helpers shared by the experiment modules."""

from __future__ import annotations

import math

import numpy as np


def mean_stderr(values) -> tuple[float, float]:
    """Sample mean and standard error of the mean."""
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        raise ValueError("empty sample")
    if len(v) == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n > 0 required")
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def fit_log_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against x (y must be positive)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two points to fit a slope")
    if np.any(y <= 0):
        raise ValueError("log fit requires positive values")
    ly = np.log(y)
    xm, lym = x.mean(), ly.mean()
    return float(np.dot(x - xm, ly - lym) / np.dot(x - xm, x - xm))
