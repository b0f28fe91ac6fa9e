"""Context-tree weighting and the sequential directed-information estimator.

A depth-bounded context tree mixes Krichevsky-Trofimov (KT) estimates of all
tree sources up to ``max_depth``.  Each node keeps per-symbol counts and the
log of ``beta = P_e(s) / prod_c P_w(c)``, which lets the weighted conditional
probability of the next symbol be computed bottom-up along the context path::

    q_s(a) = g * kt_s(a) + (1 - g) * q_child(a),   g = w*beta / (w*beta + 1 - w)

with ``w`` the prior weight of stopping at the node.

The directed information estimate averages, over time, the relative entropy
between two predictors of ``y_i``: one that sees ``x^i, y^{i-1}, z^i`` and one
that sees only ``y^{i-1}, z^i``.  Both come from context trees over combined
alphabets; the first from a tree over ``(x, y, z)``, the second from a tree
over ``(y, z)``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numba
import numpy as np

from ._validation import check_int, check_real
from .empirical import role_streams
from .series import combine_arrays

DEFAULT_BURN_IN = 100
# keeps the per-node count matrix of a single tree under ~1 GiB
MAX_TREE_CELLS = 2 ** 27


def default_burn_in(depth: int) -> int:
    return max(depth, DEFAULT_BURN_IN)


class _Node:
    __slots__ = ("counts", "total", "log_beta")

    def __init__(self, m: int):
        self.counts = np.zeros(m)
        self.total = 0.0
        self.log_beta = 0.0


class ContextTreeModel:
    """Sequential CTW probability assignment over ``{0, ..., alphabet_size-1}``.

    Contexts are given most-recent symbol first and may be shorter than
    ``max_depth`` at the start of a sequence; the path then stops early and
    its last node acts as a leaf.
    """

    def __init__(self, alphabet_size: int, max_depth: int, prior_weight: float = 0.5):
        self.alphabet_size = check_int(alphabet_size, "alphabet_size", minimum=2)
        self.max_depth = check_int(max_depth, "max_depth", minimum=0)
        self.prior_weight = check_real(prior_weight, "prior_weight", low=0.0, high=1.0,
                                       low_open=True)
        if self.prior_weight >= 1.0:
            raise ValueError("prior_weight must lie in (0, 1)")
        self._log_odds = math.log(self.prior_weight / (1.0 - self.prior_weight))
        self.nodes: dict[tuple, _Node] = {}
        self.touches = 0

    def _path(self, context) -> list[tuple]:
        context = tuple(int(c) for c in context)
        for c in context[:self.max_depth]:
            if not 0 <= c < self.alphabet_size:
                raise ValueError(f"context symbol {c} outside alphabet")
        depth = min(len(context), self.max_depth)
        return [context[:j] for j in range(depth + 1)]

    def _check_symbol(self, symbol) -> int:
        symbol = int(symbol)
        if not 0 <= symbol < self.alphabet_size:
            raise ValueError(f"symbol {symbol} outside alphabet [0, {self.alphabet_size})")
        return symbol

    def _kt(self, node: _Node | None) -> np.ndarray:
        m = self.alphabet_size
        if node is None:
            return np.full(m, 1.0 / m)
        return (node.counts + 0.5) / (node.total + m / 2.0)

    def _levels(self, path):
        """Weighted predictions at each depth, deepest first, plus the KT terms."""
        nodes = [self.nodes.get(c) for c in path]
        kts = [self._kt(node) for node in nodes]
        q = kts[-1]
        qs = [q]
        for node, kt in zip(reversed(nodes[:-1]), reversed(kts[:-1])):
            log_beta = node.log_beta if node is not None else 0.0
            g = 1.0 / (1.0 + math.exp(-(log_beta + self._log_odds)))
            q = g * kt + (1.0 - g) * q
            qs.append(q)
        return nodes, kts, qs[::-1]

    def predict(self, context=()) -> np.ndarray:
        """Predictive distribution of the next symbol given ``context``."""
        _, _, qs = self._levels(self._path(context))
        return qs[0]

    def update(self, context, symbol) -> "ContextTreeModel":
        """Record ``symbol`` as the successor of ``context``."""
        symbol = self._check_symbol(symbol)
        path = self._path(context)
        _, kts, qs = self._levels(path)
        for j, ctx in enumerate(path):
            node = self.nodes.get(ctx)
            if node is None:
                node = self.nodes[ctx] = _Node(self.alphabet_size)
            if j < len(path) - 1:
                node.log_beta += math.log(kts[j][symbol]) - math.log(qs[j + 1][symbol])
            node.counts[symbol] += 1
            node.total += 1
            self.touches += 1
        return self

    def log2_probability(self, sequence: Sequence[int]) -> float:
        """Sequential code length of ``sequence`` (bits, negated), updating the model."""
        total = 0.0
        history: list[int] = []
        for s in sequence:
            context = history[::-1][:self.max_depth]
            total += math.log2(self.predict(context)[self._check_symbol(s)])
            self.update(context, s)
            history.append(int(s))
        return total


def ct_predict(model: ContextTreeModel, context=()) -> np.ndarray:
    return model.predict(context)


def ct_update(model: ContextTreeModel, context, symbol) -> ContextTreeModel:
    return model.update(context, symbol)


# ----------------------------------------------------------------- batch kernel


def context_node_ids(symbols: np.ndarray, alphabet_size: int, depth: int):
    """Dense node index of every context on every time step's path.

    Returns ``(ids, n_nodes)`` with ``ids[i, j]`` the node for the length-``j``
    context preceding step ``i`` (``-1`` when ``j > i``).
    """
    n = symbols.size
    ids = np.full((n, depth + 1), -1, dtype=np.int64)
    ids[:, 0] = 0
    offset = 1
    for j in range(1, depth + 1):
        if j >= n:
            break
        # rows are (w_{i-1}, ..., w_{i-j}) for i = j..n-1
        ctx = np.column_stack([symbols[j - k:n - k] for k in range(1, j + 1)])
        if float(alphabet_size) ** j < 2.0 ** 62:
            key = np.zeros(n - j, dtype=np.int64)
            for k in range(j):
                key = key * alphabet_size + ctx[:, k]
            uniq, inverse = np.unique(key, return_inverse=True)
        else:
            uniq, inverse = np.unique(ctx, axis=0, return_inverse=True)
        ids[j:, j] = inverse.ravel() + offset
        offset += len(uniq)
    return ids, offset


@numba.njit(cache=True)
def _ctw_sweep(symbols, ids, n_nodes, m, log_odds, query):  # pragma: no cover - jit
    n, width = ids.shape
    counts = np.zeros((n_nodes, m))
    totals = np.zeros(n_nodes)
    log_beta = np.zeros(n_nodes)
    out = np.empty((n, query.shape[1]))
    q = np.empty(m)
    kt_sym = np.empty(width)
    q_sym = np.empty(width)
    half_m = m / 2.0
    for i in range(n):
        s = symbols[i]
        top = width - 1
        while ids[i, top] < 0:
            top -= 1
        leaf = ids[i, top]
        for a in range(m):
            q[a] = (counts[leaf, a] + 0.5) / (totals[leaf] + half_m)
        kt_sym[top] = q[s]
        q_sym[top] = q[s]
        for j in range(top - 1, -1, -1):
            node = ids[i, j]
            g = 1.0 / (1.0 + math.exp(-(log_beta[node] + log_odds)))
            denom = totals[node] + half_m
            kt_sym[j] = (counts[node, s] + 0.5) / denom
            for a in range(m):
                q[a] = g * (counts[node, a] + 0.5) / denom + (1.0 - g) * q[a]
            q_sym[j] = q[s]
        for k in range(query.shape[1]):
            out[i, k] = q[query[i, k]]
        # the last node codes s with its KT estimate on both sides of the
        # mixture, so its weight ratio is unchanged
        counts[leaf, s] += 1.0
        totals[leaf] += 1.0
        for j in range(top):
            node = ids[i, j]
            log_beta[node] += math.log(kt_sym[j]) - math.log(q_sym[j + 1])
            counts[node, s] += 1.0
            totals[node] += 1.0
    return out


def ctw_sequential(symbols, alphabet_size: int, depth: int, query=None,
                   prior_weight: float = 0.5) -> np.ndarray:
    """Run CTW over ``symbols`` and return predicted probabilities per step.

    ``query[i, k]`` selects which symbol's probability is reported for step
    ``i`` (before the model sees ``symbols[i]``); by default the full
    distribution is returned.
    """
    symbols = np.ascontiguousarray(symbols, dtype=np.int64)
    m = check_int(alphabet_size, "alphabet_size", minimum=1)
    depth = check_int(depth, "depth", minimum=0)
    if symbols.size and (symbols.min() < 0 or symbols.max() >= m):
        raise ValueError(f"symbols outside alphabet [0, {m})")
    if query is None:
        query = np.broadcast_to(np.arange(m), (symbols.size, m))
    query = np.ascontiguousarray(query, dtype=np.int64)
    if query.shape[0] != symbols.size:
        raise ValueError("query must have one row per symbol")
    if query.size and (query.min() < 0 or query.max() >= m):
        raise ValueError("query symbols outside alphabet")
    if symbols.size == 0:
        return np.empty((0, query.shape[1]))
    ids, n_nodes = context_node_ids(symbols, m, depth)
    if n_nodes * m > MAX_TREE_CELLS:
        raise MemoryError(
            f"context tree needs {n_nodes} nodes x {m} symbols; reduce depth, levels "
            "or the number of conditioning nodes")
    log_odds = math.log(prior_weight / (1.0 - prior_weight))
    return _ctw_sweep(symbols, ids, n_nodes, m, log_odds, query)


def ct_conditionals(x, y, z=(), depth: int = 1, prior_weight: float = 0.5):
    """Per-step predictive laws of ``y_i`` with and without the ``x`` stream.

    Returns ``(p_full, p_reduced)``, each ``(n, |Y|)``: ``p_full[i]`` is the
    law of ``y_i`` given ``x^i, y^{i-1}, z^i`` and ``p_reduced[i]`` the law
    given ``y^{i-1}, z^i``.
    """
    depth = check_int(depth, "depth", minimum=0)
    (xs, nx), (ys, ny), (zs, nz) = role_streams(x, y, z)
    n = xs.size
    labels = np.arange(ny)
    w = combine_arrays([xs, ys, zs], (nx, ny, nz))
    q_full = xs[:, None] + nx * (labels[None, :] + ny * zs[:, None])
    joint = ctw_sequential(w, max(nx * ny * nz, 2), depth, q_full, prior_weight)
    v = combine_arrays([ys, zs], (ny, nz))
    q_red = labels[None, :] + ny * zs[:, None]
    reduced = ctw_sequential(v, max(ny * nz, 2), depth, q_red, prior_weight)
    p_full = joint / joint.sum(axis=1, keepdims=True)
    p_reduced = reduced / reduced.sum(axis=1, keepdims=True)
    assert p_full.shape == (n, ny)
    return p_full, p_reduced


def _step_terms(x, y, z, depth, burn_in, prior_weight):
    p_full, p_reduced = ct_conditionals(x, y, z, depth, prior_weight)
    n = p_full.shape[0]
    if burn_in is None:
        burn_in = default_burn_in(depth)
    burn_in = check_int(burn_in, "burn_in", minimum=0)
    if burn_in >= n:
        raise ValueError(f"burn_in={burn_in} leaves no samples out of {n}")
    p, q = p_full[burn_in:], p_reduced[burn_in:]
    log_q = np.log2(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_p = np.where(p > 0, np.log2(p), 0.0)
    cross = -np.sum(p * log_q, axis=1)
    div = np.maximum(np.sum(p * (log_p - log_q), axis=1), 0.0)
    return np.minimum(div, cross), cross


def directed_info_and_entropy_ct(x, y, z=(), depth: int = 1, burn_in: int | None = None,
                                 prior_weight: float = 0.5) -> tuple[float, float]:
    """``(I_ct, H_ct)`` from a single pair of context-tree sweeps."""
    div, cross = _step_terms(x, y, z, depth, burn_in, prior_weight)
    return float(div.mean()), float(cross.mean())


def directed_info_ct(x, y, z=(), depth: int = 1, burn_in: int | None = None,
                     prior_weight: float = 0.5) -> float:
    """Time-averaged relative entropy between the two predictors of ``y`` (bits).

    The first ``burn_in`` steps (default ``max(depth, 100)``) are left out of
    the average; ``burn_in=0`` averages over every step.
    """
    return directed_info_and_entropy_ct(x, y, z, depth, burn_in, prior_weight)[0]


def causally_conditioned_entropy_ct(x, y, z=(), depth: int = 1, burn_in: int | None = None,
                                    prior_weight: float = 0.5) -> float:
    """Time-averaged cross entropy of the reduced predictor under the full one (bits)."""
    return directed_info_and_entropy_ct(x, y, z, depth, burn_in, prior_weight)[1]
