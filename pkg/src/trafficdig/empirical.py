"""Plug-in estimate of causally conditioned directed information.

Under an order-``d`` Markov simplification the directed information rate
from X to Y causally conditioned on Z reduces to the conditional mutual
information ``I(Y_{d+1}; X^{d+1} | Y^d, Z^{d+1})`` of a single length-``d+1``
block.  The block law is estimated by counting; all quantities are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._validation import check_int
from .series import QuantizedSeries, combine_arrays, split_array


class InsufficientDataError(ValueError):
    pass


def as_symbols(series) -> tuple[np.ndarray, int]:
    """Symbols and alphabet size of a quantized series or integer array.

    Plain arrays get the alphabet ``{0..max}``.
    """
    if isinstance(series, QuantizedSeries):
        return series.symbols, series.alphabet_size
    arr = np.asarray(series)
    if arr.ndim != 1:
        raise ValueError("symbol series must be one-dimensional")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() < 0:
        raise ValueError("symbols must be non-negative")
    return arr, int(arr.max()) + 1 if arr.size else 1


def hyper_node(z, n: int) -> tuple[np.ndarray, int]:
    """Combine conditioning series into one super-alphabet stream.

    An empty list yields a constant unit-alphabet stream.
    """
    if not z:
        return np.zeros(n, dtype=np.int64), 1
    parts = [as_symbols(s) for s in z]
    for sym, _ in parts:
        if sym.size != n:
            raise ValueError(f"length mismatch in conditioning set: {sym.size} vs {n}")
    sizes = [size for _, size in parts]
    return combine_arrays([sym for sym, _ in parts], sizes), int(np.prod(sizes))


def role_streams(x, y, z):
    xs, nx = as_symbols(x)
    ys, ny = as_symbols(y)
    if xs.size != ys.size:
        raise ValueError(f"length mismatch: x has {xs.size} samples, y has {ys.size}")
    zs, nz = hyper_node(list(z or []), xs.size)
    return (xs, nx), (ys, ny), (zs, nz)


@dataclass(frozen=True)
class BlockCountTable:
    """Sparse counts of length-``depth+1`` blocks of combined symbols.

    Block rows list the combined symbol ``w = x + |X| * (y + |Y| * z)`` from
    oldest to newest.
    """

    depth: int
    alphabet_sizes: tuple
    blocks: np.ndarray
    weights: np.ndarray

    @property
    def total(self) -> int:
        return int(self.weights.sum())

    @cached_property
    def counts(self) -> dict:
        return {tuple(row): int(c) for row, c in zip(self.blocks.tolist(), self.weights)}

    def roles(self):
        """Per-role symbol matrices ``(x, y, z)``, each ``(n_keys, depth+1)``."""
        return split_array(self.blocks, self.alphabet_sizes)


def _unique_rows(rows: np.ndarray, base: int):
    """Unique rows with inverse, through a scalar key when it fits in 64 bits."""
    width = rows.shape[1]
    if width == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(rows.shape[0], dtype=np.int64)
    if float(base) ** width < 2.0 ** 62:
        key = np.zeros(rows.shape[0], dtype=np.int64)
        for j in range(width):
            key = key * base + rows[:, j]
        _, first, inverse = np.unique(key, return_index=True, return_inverse=True)
        return rows[first], inverse.ravel()
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    return uniq, inverse.ravel()


def count_blocks(x, y, z=(), depth: int = 1) -> BlockCountTable:
    """Count every window ``(w_{i-d}, ..., w_i)`` of the combined stream."""
    depth = check_int(depth, "depth", minimum=0)
    (xs, nx), (ys, ny), (zs, nz) = role_streams(x, y, z)
    n = xs.size
    if n <= depth:
        raise InsufficientDataError(f"need more than {depth} samples, got {n}")
    sizes = (nx, ny, nz)
    w = combine_arrays([xs, ys, zs], sizes)
    windows = sliding_window_view(w, depth + 1)
    blocks, inverse = _unique_rows(windows, nx * ny * nz)
    weights = np.bincount(inverse, minlength=blocks.shape[0]).astype(np.int64)
    return BlockCountTable(depth, sizes, blocks, weights)


def _conditional_entropy(joint_rows, cond_rows, weights, base) -> float:
    """``H(A | B)`` in bits where rows of ``joint_rows`` refine ``cond_rows``."""
    total = weights.sum()
    _, inv_joint = _unique_rows(joint_rows, base)
    _, inv_cond = _unique_rows(cond_rows, base)
    pj = np.bincount(inv_joint, weights=weights)
    pc = np.bincount(inv_cond, weights=weights)
    # map every joint cell to its conditioning cell
    cell = np.zeros(pj.size, dtype=np.int64)
    cell[inv_joint] = inv_cond
    nz = pj > 0
    return float(-np.sum(pj[nz] / total * np.log2(pj[nz] / pc[cell[nz]])))


def _entropies(table: BlockCountTable) -> tuple[float, float]:
    """``H(Y_d | Y^{d-1}, Z^d)`` and ``H(Y_d | X^d, Y^{d-1}, Z^d)``."""
    xr, yr, zr = table.roles()
    d = table.depth
    base = max(table.alphabet_sizes)
    past = np.hstack([yr[:, :d], zr])
    with_target = np.hstack([past, yr[:, d:]])
    h_marginal = _conditional_entropy(with_target, past, table.weights, base)
    full_past = np.hstack([xr, past])
    h_full = _conditional_entropy(np.hstack([full_past, yr[:, d:]]), full_past,
                                  table.weights, base)
    return h_marginal, h_full


def conditional_directed_info_emp(table: BlockCountTable) -> float:
    """``I(Y_{d+1}; X^{d+1} | Y^d, Z^{d+1})`` under the empirical block law."""
    h_marginal, h_full = _entropies(table)
    return float(min(max(h_marginal - h_full, 0.0), max(h_marginal, 0.0)))


def causally_conditioned_entropy_emp(table: BlockCountTable) -> float:
    """``H(Y_{d+1} | Y^d, Z^{d+1})`` under the empirical block law."""
    return float(max(_entropies(table)[0], 0.0))


def directed_info_emp(x, y, z=(), depth: int = 1) -> tuple[float, float]:
    """Convenience wrapper returning ``(I, H)`` from one count table."""
    table = count_blocks(x, y, z, depth)
    h_marginal, h_full = _entropies(table)
    h = max(h_marginal, 0.0)
    return float(min(max(h_marginal - h_full, 0.0), h)), float(h)
