"""Directed information graph estimation over a sensor network.

For every ordered pair of sensors ``(m, l)`` the directed information from
``m`` to ``l`` causally conditioned on all remaining sensors (combined into a
single hyper-node) is normalized by the causally conditioned entropy of
``l``.  The resulting ratio matrix ``G`` is scaled by its largest entry and
thresholded to give the graph.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_alpha, check_flow_matrix, check_int
from .ctw import directed_info_and_entropy_ct
from .empirical import directed_info_emp
from .lag import estimate_depth
from .series import STRATEGIES, FlowSeries, QuantizedSeries, fit_quantizer, quantize_array

logger = logging.getLogger(__name__)

ESTIMATORS = ("empirical", "ctw")
DEFAULT_MAX_ALPHABET = 2 ** 16
_RATIO_TOL = 1e-9


class ConsistencyError(ArithmeticError):
    """An estimator returned directed information above its entropy bound."""


@dataclass
class CausalGraphResult:
    node_ids: list
    depth: int
    estimator: str
    alpha: float
    I: np.ndarray
    H: np.ndarray
    G: np.ndarray
    G_nor: np.ndarray
    adjacency: np.ndarray
    diagnostics: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        """True when no pair carried any information."""
        return not np.any(self.G > 0)

    def edges(self) -> list[tuple[str, str, float]]:
        rows, cols = np.nonzero(self.adjacency)
        return [(self.node_ids[i], self.node_ids[j], float(self.G_nor[i, j]))
                for i, j in zip(rows, cols)]


def normalize_di(I_val: float, H_val: float) -> float:
    """Directed information as a fraction of the target's conditional entropy."""
    if I_val < 0 or H_val < 0:
        raise ValueError(f"information values must be non-negative: I={I_val}, H={H_val}")
    if H_val == 0:
        if I_val > _RATIO_TOL:
            raise ConsistencyError(f"I={I_val} exceeds H=0")
        return 0.0
    if I_val > H_val * (1 + _RATIO_TOL) + _RATIO_TOL:
        raise ConsistencyError(f"I={I_val} exceeds H={H_val}")
    return min(I_val / H_val, 1.0)


def normalize_matrix(A) -> np.ndarray:
    """``|A| / max |A|``; an all-zero matrix stays zero."""
    A = np.abs(np.asarray(A, dtype=np.float64))
    peak = A.max() if A.size else 0.0
    return A / peak if peak > 0 else np.zeros_like(A)


def threshold_graph(G_nor, alpha: float) -> np.ndarray:
    G_nor = np.asarray(G_nor, dtype=np.float64)
    if G_nor.ndim != 2 or G_nor.shape[0] != G_nor.shape[1]:
        raise ValueError("G_nor must be a square matrix")
    alpha = check_alpha(alpha)
    adjacency = G_nor >= alpha
    np.fill_diagonal(adjacency, False)
    return adjacency


def _pair_information(estimator, x, y, z, depth, burn_in):
    if estimator == "ctw":
        return directed_info_and_entropy_ct(x, y, z, depth, burn_in=burn_in)
    return directed_info_emp(x, y, z, depth)


class DirectedInformationGraph(BaseEstimator):
    """Estimate the directed information graph of a set of flow series.

    Parameters
    ----------
    levels : int, default=2
        Quantization levels per sensor.
    alpha : float, default=0.4
        Threshold on the max-normalized ratio matrix, in ``(0, 1]``.
    estimator : {"ctw", "empirical"}, default="ctw"
        Context-tree or plug-in estimate of the information quantities.
    depth : int or None, default=None
        Memory depth.  ``None`` picks the largest cross-covariance peak lag.
    tau_max : int or None, default=None
        Largest lag scanned when picking the depth (``min(n-1, 48)`` if None).
    strategy : {"equal_frequency", "equal_width"}, default="equal_frequency"
        Quantizer threshold placement.  Constant sensors always map to 0.
    exclude : sequence of str, default=()
        Sensor ids dropped from the network before estimation.
    burn_in : int or None, default=None
        Steps left out of the context-tree averages.
    max_alphabet : int, default=65536
        Largest combined alphabet of a pair plus its hyper-node.

    Attributes
    ----------
    node_ids_ : list of str
    depth_ : int
    I_, H_, G_, G_nor_ : ndarray of shape (n_nodes, n_nodes)
    adjacency_ : ndarray of bool
    result_ : CausalGraphResult
    """

    def __init__(self, levels=2, alpha=0.4, estimator="ctw", depth=None, tau_max=None,
                 strategy="equal_frequency", exclude=(), burn_in=None,
                 max_alphabet=DEFAULT_MAX_ALPHABET):
        self.levels = levels
        self.alpha = alpha
        self.estimator = estimator
        self.depth = depth
        self.tau_max = tau_max
        self.strategy = strategy
        self.exclude = exclude
        self.burn_in = burn_in
        self.max_alphabet = max_alphabet

    def _validate_params(self):
        check_int(self.levels, "levels", minimum=2)
        check_alpha(self.alpha)
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.depth is not None:
            check_int(self.depth, "depth", minimum=0)
        check_int(self.max_alphabet, "max_alphabet", minimum=2)

    def fit(self, X, y=None, node_ids=None):
        """Fit on a flow matrix or a list of :class:`FlowSeries`.

        ``X`` is ``(n_samples, n_nodes)``; ``node_ids`` names the columns
        (default ``"0", "1", ...``).  ``y`` is ignored.
        """
        self._validate_params()
        if len(X) and isinstance(X[0], FlowSeries):
            if node_ids is None:
                node_ids = [s.node_id for s in X]
            lengths = {len(s) for s in X}
            if len(lengths) != 1:
                raise ValueError(f"series lengths differ: {sorted(lengths)}")
            X = np.column_stack([s.samples for s in X])
        X = check_flow_matrix(X)
        if node_ids is None:
            node_ids = [str(j) for j in range(X.shape[1])]
        node_ids = [str(v) for v in node_ids]
        if len(node_ids) != X.shape[1]:
            raise ValueError(f"{len(node_ids)} node ids for {X.shape[1]} columns")
        if len(set(node_ids)) != len(node_ids):
            raise ValueError("node ids must be unique")
        excluded = [str(e) for e in (self.exclude or ())]
        unknown = sorted(set(excluded) - set(node_ids))
        if unknown:
            raise ValueError(f"unknown node id(s) in exclude: {', '.join(unknown)}")
        keep = [j for j, v in enumerate(node_ids) if v not in set(excluded)]
        if len(keep) < 2:
            raise ValueError("need at least two non-excluded sensors")
        X = X[:, keep]
        node_ids = [node_ids[j] for j in keep]
        n, M = X.shape

        if self.depth is None:
            depth = estimate_depth([X[:, j] for j in range(M)], self.tau_max)
        else:
            depth = int(self.depth)
        if n <= depth + 1:
            raise ValueError(f"{n} samples are too few for depth {depth}")

        quantized = []
        for j in range(M):
            # a constant sensor cannot be split by frequency; it quantizes to 0
            strategy = "equal_width" if np.all(X[:, j] == X[0, j]) else self.strategy
            spec = fit_quantizer(X[:, j], self.levels, strategy)
            quantized.append(QuantizedSeries(node_ids[j], quantize_array(X[:, j], spec), spec))
        joint = float(self.levels) ** M
        if joint > self.max_alphabet:
            raise ValueError(
                f"combined alphabet {self.levels}^{M} = {joint:.0f} exceeds max_alphabet="
                f"{self.max_alphabet}; exclude sensors or lower the quantization levels")

        info = np.zeros((M, M))
        ent = np.zeros((M, M))
        ratio = np.zeros((M, M))
        diagnostics = []
        for m, l in permutations(range(M), 2):
            rest = [quantized[k] for k in range(M) if k not in (m, l)]
            i_val, h_val = _pair_information(self.estimator, quantized[m], quantized[l], rest,
                                             depth, self.burn_in)
            info[m, l], ent[m, l] = i_val, h_val
            if h_val == 0:
                msg = (f"H({node_ids[l]} || rest) = 0 for pair {node_ids[m]}->{node_ids[l]}; "
                       "ratio set to 0")
                logger.info(msg)
                diagnostics.append(msg)
            ratio[m, l] = normalize_di(i_val, h_val)

        G_nor = normalize_matrix(ratio)
        adjacency = threshold_graph(G_nor, self.alpha)
        if not np.any(ratio > 0):
            diagnostics.append("no directed information detected between any pair")

        self.node_ids_ = node_ids
        self.depth_ = depth
        self.I_, self.H_, self.G_, self.G_nor_ = info, ent, ratio, G_nor
        self.adjacency_ = adjacency
        self.n_features_in_ = M
        self.result_ = CausalGraphResult(node_ids, depth, self.estimator, float(self.alpha),
                                         info, ent, ratio, G_nor, adjacency, diagnostics)
        return self

    def edges(self):
        check_is_fitted(self, "result_")
        return self.result_.edges()


def estimate_dig(series: Sequence[FlowSeries], *, levels: int = 2, alpha: float = 0.4,
                 estimator: str = "ctw", depth: int | None = None,
                 tau_max: int | None = None, exclude=(), strategy: str = "equal_frequency",
                 burn_in: int | None = None,
                 max_alphabet: int = DEFAULT_MAX_ALPHABET) -> CausalGraphResult:
    """Functional front end to :class:`DirectedInformationGraph`."""
    if len(series) < 2:
        raise ValueError("need at least two series")
    model = DirectedInformationGraph(levels=levels, alpha=alpha, estimator=estimator,
                                     depth=depth, tau_max=tau_max, strategy=strategy,
                                     exclude=tuple(exclude), burn_in=burn_in,
                                     max_alphabet=max_alphabet)
    return model.fit(list(series)).result_
