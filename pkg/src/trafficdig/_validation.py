"""Input validation helpers shared by the estimators."""

from __future__ import annotations

from numbers import Integral, Real

import numpy as np
from sklearn.utils.validation import check_array


def check_int(value, name: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_real(value, name: str, low: float | None = None, high: float | None = None,
               low_open: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if low is not None and (value < low or (low_open and value == low)):
        bound = f"> {low}" if low_open else f">= {low}"
        raise ValueError(f"{name} must be {bound}, got {value}")
    if high is not None and value > high:
        raise ValueError(f"{name} must be <= {high}, got {value}")
    return value


def check_alpha(alpha) -> float:
    return check_real(alpha, "alpha", low=0.0, high=1.0, low_open=True)


def check_flow_matrix(X, min_nodes: int = 1) -> np.ndarray:
    """Validate a (n_samples, n_nodes) matrix of non-negative flows.

    Real values are floored to integer vehicle counts.
    """
    X = check_array(X, dtype=np.float64, ensure_min_features=min_nodes)
    if np.any(X < 0):
        raise ValueError("flow samples must be non-negative")
    return np.floor(X).astype(np.int64)


def check_symbols(symbols, size: int, name: str = "symbols") -> np.ndarray:
    arr = np.asarray(symbols)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.mod(arr, 1) == 0):
            raise ValueError(f"{name} must contain integers")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= size):
        raise ValueError(f"{name} out of alphabet [0, {size})")
    return arr


def check_same_length(*arrays, names=None) -> int:
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        label = ", ".join(names) if names else "series"
        raise ValueError(f"length mismatch between {label}: {sorted(lengths)}")
    return lengths.pop() if lengths else 0
