"""Poisson queue traffic: sensors in sequence, a merge, and a linear test system.

Cars enter at the upstream sensor(s) as Poisson arrivals whose mean switches
between a high and a low value every ``period`` samples.  Each car moves on
independently; links have no capacity.  Every sensor also reads independent
Poisson noise (side-road cars, counting errors) that does not propagate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .._validation import check_int, check_real
from ..series import FlowSeries
from ._rng import derive_rng, poisson_inversion


@dataclass(frozen=True)
class PoissonChainConfig:
    num_sensors: int = 4
    n: int = 100_000
    lambda_high: float = 5.0
    lambda_low: float = 1.0
    period: int = 20
    noise_mean: float | Sequence[float] = 1.0
    instantaneous: bool = False
    p_fast: float = 0.5
    seed: int = 0
    period_seconds: int = 300

    def __post_init__(self):
        check_int(self.num_sensors, "num_sensors", minimum=2)
        check_int(self.n, "n", minimum=1)
        check_real(self.lambda_high, "lambda_high", low=0.0)
        check_real(self.lambda_low, "lambda_low", low=0.0)
        check_int(self.period, "period", minimum=1)
        check_real(self.p_fast, "p_fast", low=0.0, high=1.0)
        for mu in np.atleast_1d(self.noise_mean):
            check_real(float(mu), "noise_mean", low=0.0)

    def noise_means(self, count: int) -> np.ndarray:
        mu = np.atleast_1d(np.asarray(self.noise_mean, dtype=np.float64))
        if mu.size == 1:
            return np.full(count, mu[0])
        if mu.size != count:
            raise ValueError(f"expected {count} noise means, got {mu.size}")
        return mu


def alternating_means(n: int, high: float, low: float, period: int) -> np.ndarray:
    """High mean for the first ``period`` samples, then low, and so on."""
    phase = (np.arange(n) // period) % 2
    return np.where(phase == 0, high, low)


def _series(rows: Sequence[np.ndarray], period_seconds: int, prefix: str = "s"):
    return [FlowSeries(f"{prefix}{j + 1}", row, period_seconds) for j, row in enumerate(rows)]


def _split_fast(rng, cars: np.ndarray, p_fast: float):
    """Split each step's cars into same-step and next-step arrivals downstream."""
    fast = rng.binomial(cars, p_fast)
    return fast, cars - fast


def _delay(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    out[1:] = values[:-1]
    return out


def generate_chain(config: PoissonChainConfig) -> list[FlowSeries]:
    """Sensors in sequence (S-I, or S-II when ``instantaneous``).

    In S-I every car reaches the next sensor exactly one step later.  In S-II
    each car independently shows up at the next sensor in the same step with
    probability ``p_fast``, otherwise one step later; a car can therefore be
    seen by several sensors within one step.
    """
    rng = derive_rng(config.seed, "poisson/chain/s2" if config.instantaneous else "poisson/chain/s1")
    n = config.n
    lam = alternating_means(n, config.lambda_high, config.lambda_low, config.period)
    cars = poisson_inversion(rng, lam)
    traffic = [cars]
    for _ in range(config.num_sensors - 1):
        upstream = traffic[-1]
        if config.instantaneous:
            fast, slow = _split_fast(rng, upstream, config.p_fast)
            traffic.append(fast + _delay(slow))
        else:
            traffic.append(_delay(upstream))
    mu = config.noise_means(config.num_sensors)
    noise = [poisson_inversion(rng, mu[j], n) for j in range(config.num_sensors)]
    return _series([t + e for t, e in zip(traffic, noise)], config.period_seconds)


def generate_merge(config: PoissonChainConfig) -> list[FlowSeries]:
    """Two independent inputs merging into a third sensor (S-III).

    Cars from sensor 1 reach sensor 3 in the same step with probability
    ``p_fast`` (one step later otherwise); cars from sensor 2 always arrive one
    step later.  ``num_sensors`` and ``instantaneous`` are ignored.
    """
    rng = derive_rng(config.seed, "poisson/merge")
    n = config.n
    lam = alternating_means(n, config.lambda_high, config.lambda_low, config.period)
    first = poisson_inversion(rng, lam)
    second = poisson_inversion(rng, lam)
    fast, slow = _split_fast(rng, first, config.p_fast)
    merged = fast + _delay(slow) + _delay(second)
    mu = config.noise_means(3)
    noise = [poisson_inversion(rng, mu[j], n) for j in range(3)]
    return _series([first + noise[0], second + noise[1], merged + noise[2]],
                   config.period_seconds)


@dataclass(frozen=True)
class LinearPoissonCoeffs:
    """Coefficients of the three-sensor linear Poisson system::

        X_i = a1 Z_{i-1} + N_i
        Y_i = a2 X_{i-1} + a3 Z_i + N'_i
        Z_i = a4 Z_{i-2} + N''_i
    """

    a1: float = 0.5
    a2: float = 0.5
    a3: float = 0.5
    a4: float = 0.4
    noise_x: float = 2.0
    noise_y: float = 2.0
    noise_z: float = 2.0
    n: int = 100_000
    seed: int = 0
    period_seconds: int = 300

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4"):
            check_real(getattr(self, name), name, low=0.0)
        if not self.a4 < 1.0:
            raise ValueError(f"unstable system: |a4| = {self.a4} must be < 1")
        for name in ("noise_x", "noise_y", "noise_z"):
            check_real(getattr(self, name), name, low=0.0)
        check_int(self.n, "n", minimum=3)


def simulate_linear_model(coeffs: LinearPoissonCoeffs, burn: int = 200) -> np.ndarray:
    """Real-valued ``(n, 3)`` trajectory of ``(X, Y, Z)`` after a warm-up."""
    rng = derive_rng(coeffs.seed, "poisson/linear")
    total = coeffs.n + burn
    nx = poisson_inversion(rng, coeffs.noise_x, total).astype(np.float64)
    ny = poisson_inversion(rng, coeffs.noise_y, total).astype(np.float64)
    nz = poisson_inversion(rng, coeffs.noise_z, total).astype(np.float64)
    z = np.zeros(total)
    for i in range(total):
        z[i] = nz[i] + (coeffs.a4 * z[i - 2] if i >= 2 else 0.0)
    x = nx.copy()
    x[1:] += coeffs.a1 * z[:-1]
    y = ny + coeffs.a3 * z
    y[1:] += coeffs.a2 * x[:-1]
    return np.column_stack([x, y, z])[burn:]


def generate_linear_model(coeffs: LinearPoissonCoeffs, return_raw: bool = False):
    """Series ``x, y, z`` rounded to the nearest integer count.

    With ``return_raw=True`` the real-valued ``(n, 3)`` trajectory is returned
    alongside.
    """
    raw = simulate_linear_model(coeffs)
    rounded = np.rint(raw).astype(np.int64)
    series = [FlowSeries(name, rounded[:, j], coeffs.period_seconds)
              for j, name in enumerate(("x", "y", "z"))]
    return (series, raw) if return_raw else series
