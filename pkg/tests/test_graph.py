import logging

import numpy as np
import pytest
from sklearn.base import clone

from trafficdig.graph import (ConsistencyError, DirectedInformationGraph, estimate_dig,
                              normalize_di, normalize_matrix, threshold_graph)
from trafficdig.series import FlowSeries


def test_normalize_di_cases():
    assert normalize_di(0.0, 0.8) == 0.0
    assert normalize_di(0.7, 0.7) == 1.0
    assert normalize_di(0.63, 0.9) == pytest.approx(0.7)
    assert normalize_di(0.0, 0.0) == 0.0
    with pytest.raises(ConsistencyError):
        normalize_di(0.5, 0.4)
    with pytest.raises(ValueError):
        normalize_di(-0.1, 1.0)


def test_normalize_matrix():
    A = np.array([[0, 0.2], [0.4, 0]])
    assert normalize_matrix(A).max() == 1.0
    assert not normalize_matrix(np.zeros((2, 2))).any()


def test_threshold_cases():
    G = np.array([[1.0, 1.0, 0.3], [0.5, 0.0, 0.9], [0.1, 0.4, 0.0]])
    top = threshold_graph(G, 1.0)
    assert top.tolist() == [[False, True, False], [False, False, False], [False, False, False]]
    assert (threshold_graph(G, 0.3) >= threshold_graph(G, 0.5)).all()


def test_table_matrix_thresholding():
    # reference S-II matrix, rows are sources
    G = np.array([[0, 1, 0.1, 0.1], [0.6, 0, 0.5, 0.1], [0.1, 0.1, 0, 0.4], [0.1, 0.1, 0.1, 0]])
    edges = {(i + 1, j + 1) for i, j in zip(*np.nonzero(threshold_graph(G, 0.4)))}
    assert edges == {(1, 2), (2, 1), (2, 3), (3, 4)}


def test_white_noise_gives_no_edges():
    rng = np.random.default_rng(0)
    series = [FlowSeries(f"n{k}", rng.poisson(3, 20_000)) for k in range(2)]
    result = estimate_dig(series, depth=1, alpha=0.4)
    # the max-normalized matrix always has a unit entry; the raw ratios are tiny
    assert result.G.max() < 0.01


def test_all_constant_input_is_flagged():
    series = [FlowSeries(f"c{k}", [2] * 300) for k in range(3)]
    result = estimate_dig(series, depth=1, estimator="empirical")
    assert result.empty
    assert not result.adjacency.any()
    assert any("no directed information" in d for d in result.diagnostics)
    assert any("= 0" in d for d in result.diagnostics)


def test_exclude_and_unknown_ids():
    rng = np.random.default_rng(1)
    series = [FlowSeries(k, rng.poisson(2, 500)) for k in ("a", "b", "c")]
    result = estimate_dig(series, depth=1, exclude=["b"], estimator="empirical")
    assert result.node_ids == ["a", "c"]
    with pytest.raises(ValueError, match="unknown node"):
        estimate_dig(series, depth=1, exclude=["zz"])
    with pytest.raises(ValueError):
        estimate_dig(series, depth=1, exclude=["a", "b"])


def test_alphabet_cap():
    rng = np.random.default_rng(2)
    series = [FlowSeries(f"s{k}", rng.poisson(4, 200)) for k in range(5)]
    with pytest.raises(ValueError, match="max_alphabet"):
        estimate_dig(series, depth=1, levels=3, max_alphabet=100)


def test_estimator_api():
    model = DirectedInformationGraph(levels=2, alpha=0.5, depth=1, estimator="empirical")
    params = model.get_params()
    assert params["alpha"] == 0.5 and params["estimator"] == "empirical"
    twin = clone(model)
    X = np.random.default_rng(3).poisson(3, (2000, 3))
    twin.fit(X, node_ids=["a", "b", "c"])
    assert twin.G_nor_.shape == (3, 3)
    assert np.all(np.diag(twin.adjacency_) == 0)
    assert twin.n_features_in_ == 3
    with pytest.raises(ValueError):
        DirectedInformationGraph(estimator="magic").fit(X)
    with pytest.raises(ValueError):
        DirectedInformationGraph(alpha=0).fit(X)


def test_chain_detected_with_empirical():
    rng = np.random.default_rng(4)
    x = rng.poisson(4, 30_000)
    y = np.concatenate([[0], x[:-1]]) + rng.poisson(1, x.size)
    series = [FlowSeries("a", x), FlowSeries("b", y)]
    result = estimate_dig(series, depth=1, estimator="empirical", alpha=0.4)
    assert result.edges() == [("a", "b", 1.0)]
