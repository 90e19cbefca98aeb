"""Ordinary least squares helpers for power-law fits."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InsufficientData


class LineFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def ols(x, y) -> LineFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise InsufficientData("need at least two paired samples")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise InsufficientData("abscissae are all equal")
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    ss_res = np.sum((y - intercept - slope * x) ** 2)
    ss_tot = np.sum((y - ym) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LineFit(float(slope), float(intercept), float(min(max(r2, 0.0), 1.0)))


def loglog_ols(x, y) -> LineFit:
    """Fit ``log y = slope * log x + intercept``; ``x`` and ``y`` must be positive."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    return ols(np.log(x), np.log(y))


def geometric_indices(n_min: int, n_max: int, count: int) -> np.ndarray:
    """Distinct integers, roughly geometrically spaced on ``[n_min, n_max]``."""
    return np.unique(np.rint(np.geomspace(n_min, n_max, count)).astype(np.int64))


def decay_slope(func, n_min: int = 100, n_max: int = 100_000, count: int = 40) -> LineFit:
    """Log-log slope of ``func(n)`` sampled at geometric ``n``."""
    ns = geometric_indices(n_min, n_max, count)
    vals = np.array([func(int(n)) for n in ns])
    return loglog_ols(ns, vals)
