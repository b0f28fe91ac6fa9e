"""Asymptotic false-alarm and detection bounds for a DIG threshold test."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._validation import check_int, check_real

_EPS = 1e-12
_TINY = 1e-300
_MAX_ITER = 100_000


def _gamma_series(s: float, x: float) -> float:
    term = 1.0 / s
    total = term
    a = s
    for _ in range(_MAX_ITER):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError("incomplete gamma series did not converge")
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))


def _gamma_continued_fraction(s: float, x: float) -> float:
    # modified Lentz evaluation of the upper tail Q(s, x)
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return math.exp(-x + s * math.log(x) - math.lgamma(s)) * h


def regularized_gamma_p(s: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``."""
    s = check_real(s, "s", low=0.0, low_open=True)
    if math.isinf(x) and x > 0:
        return 1.0
    x = check_real(x, "x", low=0.0)
    if x == 0.0:
        return 0.0
    if x < s + 1.0:
        return min(_gamma_series(s, x), 1.0)
    return max(1.0 - _gamma_continued_fraction(s, x), 0.0)


@dataclass(frozen=True)
class DetectionBounds:
    M: int
    k: int
    alphabet: int
    W1: int
    I_th: float
    R: int
    PF_upper: float
    PD_lower: float

    @property
    def W0(self) -> int:
        return self.M * (self.M - 1) - self.W1


def detection_bounds(M: int, k: int, alphabet_size: int, W1: int, I_th: float) -> DetectionBounds:
    """Bounds on false-alarm and detection probability of the plug-in test.

    ``R = |X|^(M k) (|X|^M - 1)``; ``P_F <= 1 - P(R/2, I_th)`` and
    ``P_D >= max(1 - W0 (1 - P(R/2, I_th)), 0)`` with ``W0 = M(M-1) - W1``.
    """
    M = check_int(M, "M", minimum=2)
    k = check_int(k, "k", minimum=1)
    alphabet_size = check_int(alphabet_size, "alphabet_size", minimum=2)
    W1 = check_int(W1, "W1", minimum=0)
    if W1 > M * (M - 1):
        raise ValueError(f"W1={W1} exceeds the {M * (M - 1)} possible directed edges")
    I_th = float(I_th)
    if math.isnan(I_th) or I_th < 0:
        raise ValueError(f"I_th must be >= 0, got {I_th}")
    R = alphabet_size ** (M * k) * (alphabet_size ** M - 1)
    tail = 1.0 - regularized_gamma_p(R / 2.0, I_th)
    W0 = M * (M - 1) - W1
    return DetectionBounds(M, k, alphabet_size, W1, I_th, R,
                           PF_upper=tail, PD_lower=max(1.0 - W0 * tail, 0.0))
