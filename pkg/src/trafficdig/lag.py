"""Lagged cross-covariance, memory-depth selection and coefficient of determination."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from ._validation import check_int
from .series import FlowSeries

DEFAULT_TAU_MAX = 48


@dataclass(frozen=True)
class LagProfile:
    """Cross-covariance of ``pair[1]`` lagging ``pair[0]`` by ``tau`` steps."""

    pair: tuple
    values: np.ndarray
    peak_lag: int

    @property
    def tau_max(self) -> int:
        return self.values.size - 1


def _values(s) -> tuple[str, np.ndarray]:
    if isinstance(s, FlowSeries):
        return s.node_id, s.samples.astype(np.float64)
    return "", np.asarray(s, dtype=np.float64)


def default_tau_max(n: int) -> int:
    return min(n - 1, DEFAULT_TAU_MAX)


def cross_covariance(x, y, tau_max: int | None = None) -> LagProfile:
    """Covariance between ``x`` now and ``y`` ``tau`` steps later.

    ``values[tau] = 1/(n-tau) * sum_i (y[i+tau] - mean(y)) * (x[i] - mean(x))``
    with full-sample means.  ``peak_lag`` is the smallest lag maximizing
    ``|values|``, i.e. the delay with which ``x`` shows up in ``y``.
    """
    xid, xv = _values(x)
    yid, yv = _values(y)
    n = xv.size
    if yv.size != n:
        raise ValueError(f"length mismatch: {n} vs {yv.size}")
    if tau_max is None:
        tau_max = default_tau_max(n)
    tau_max = check_int(tau_max, "tau_max", minimum=0)
    if tau_max >= n:
        raise ValueError(f"tau_max={tau_max} must be smaller than the series length {n}")
    dx = xv - xv.mean()
    dy = yv - yv.mean()
    values = np.empty(tau_max + 1)
    for tau in range(tau_max + 1):
        values[tau] = np.dot(dy[tau:], dx[:n - tau]) / (n - tau)
    mag = np.abs(values)
    # tolerance keeps numerically tied peaks on the smallest lag
    peak = int(np.flatnonzero(mag >= mag.max() * (1 - 1e-12))[0]) if mag.max() > 0 else 0
    return LagProfile((xid, yid), values, peak)


def two_sided_peak(x, y, tau_max: int | None = None) -> int:
    """Signed lag of the largest ``|cov|`` over ``-tau_max..tau_max``.

    Positive values mean ``y`` follows ``x``.  Ties go to the smallest
    ``|tau|``, then to the positive side.
    """
    ahead = cross_covariance(x, y, tau_max).values
    behind = cross_covariance(y, x, tau_max).values
    mag = np.abs(np.concatenate([ahead, behind[1:]]))
    if mag.max() == 0:
        return 0
    lags = np.concatenate([np.arange(ahead.size), -np.arange(1, behind.size)])
    best = np.flatnonzero(mag >= mag.max() * (1 - 1e-12))
    order = np.lexsort((-lags[best], np.abs(lags[best])))
    return int(lags[best][order[0]])


def estimate_depth(series: Sequence, tau_max: int | None = None,
                   return_lags: bool = False):
    """Memory depth as the largest covariance peak lag over all sensor pairs.

    Each pair's covariance is scanned on both sides of zero and the absolute
    position of its peak taken; the depth is the maximum over pairs.  With
    ``return_lags=True`` the signed per-pair peaks are returned as a dict
    keyed by index pairs ``(m, l)``, ``m < l``, as well.
    """
    if len(series) < 2:
        raise ValueError("depth estimation needs at least two series")
    lags = {(m, l): two_sided_peak(series[m], series[l], tau_max)
            for m, l in combinations(range(len(series)), 2)}
    depth = max(abs(v) for v in lags.values())
    return (depth, lags) if return_lags else depth


def coefficient_of_determination(x, y, tau: int) -> float:
    """Squared Pearson correlation of ``x[t]`` against ``y[t + tau]``.

    Means and standard deviations are taken over the overlapping window.
    """
    _, xv = _values(x)
    _, yv = _values(y)
    n = xv.size
    if yv.size != n:
        raise ValueError(f"length mismatch: {n} vs {yv.size}")
    tau = check_int(tau, "tau", minimum=0)
    if tau >= n:
        raise ValueError(f"tau={tau} must be smaller than the series length {n}")
    a = xv[:n - tau]
    b = yv[tau:]
    sa, sb = a.std(), b.std()
    if sa == 0 or sb == 0:
        raise ValueError("coefficient of determination undefined for a constant window")
    r = np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb)
    return float(min(r * r, 1.0))
