import numpy as np
import pytest

from _oracles import brute_block_counts
from trafficdig.empirical import (InsufficientDataError, causally_conditioned_entropy_emp,
                                  conditional_directed_info_emp, count_blocks, directed_info_emp)
from trafficdig.series import FlowSeries, QuantizedSeries, QuantizerSpec


def qs(symbols, levels=2, name="q"):
    edges = tuple(float(k) + 0.5 for k in range(levels - 1))
    return QuantizedSeries(name, np.asarray(symbols), QuantizerSpec(levels, "equal_width", edges))


def test_single_window():
    table = count_blocks(qs([1, 0]), qs([0, 1]), depth=1)
    assert table.total == 1
    assert list(table.counts.values()) == [1]


def test_constant_series_single_key():
    table = count_blocks(qs([0] * 9), qs([1] * 9), depth=2)
    assert len(table.counts) == 1 and table.total == 7


def test_hand_enumerated_table():
    # w = x + 2 y: (0, 1, 2, 3); windows (0,1), (1,2), (2,3)
    table = count_blocks(qs([0, 1, 0, 1]), qs([0, 0, 1, 1]), depth=1)
    assert table.counts == {(0, 1): 1, (1, 2): 1, (2, 3): 1}


def test_matches_brute_force_counts():
    rng = np.random.default_rng(2)
    x, y, z = (rng.integers(0, 2, 500) for _ in range(3))
    table = count_blocks(qs(x), qs(y), [qs(z)], depth=2)
    w = x + 2 * y + 4 * z
    assert table.counts == brute_block_counts(w, 2)
    assert table.total == 498


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        count_blocks(qs([0, 1]), qs([1, 0]), depth=2)


def test_independent_is_near_zero():
    rng = np.random.default_rng(0)
    x, y, z = (rng.integers(0, 2, 100_000) for _ in range(3))
    table = count_blocks(qs(x), qs(y), [qs(z)], depth=1)
    assert conditional_directed_info_emp(table) <= 0.02


def test_unit_delay_copy_is_one_bit():
    x = np.random.default_rng(1).integers(0, 2, 100_000)
    y = np.roll(x, 1)
    y[0] = 0
    i_val, h_val = directed_info_emp(qs(x), qs(y), [qs(np.zeros_like(x))], depth=1)
    assert i_val == pytest.approx(1.0, abs=0.02)
    assert h_val == pytest.approx(1.0, abs=0.02)


def test_entropy_cases():
    rng = np.random.default_rng(4)
    x, y = rng.integers(0, 2, 100_000), rng.integers(0, 2, 100_000)
    z = rng.integers(0, 2, 100_000)
    assert causally_conditioned_entropy_emp(count_blocks(qs(x), qs(np.zeros_like(x)), depth=1)) == 0
    assert causally_conditioned_entropy_emp(count_blocks(qs(x), qs(y), [qs(z)], depth=1)) == \
        pytest.approx(1.0, abs=0.02)
    assert causally_conditioned_entropy_emp(count_blocks(qs(x), qs(z), [qs(z)], depth=1)) == \
        pytest.approx(0.0, abs=1e-12)


def test_hyper_node_order_irrelevant():
    rng = np.random.default_rng(8)
    a, b, c, d = (rng.integers(0, 2, 3000) for _ in range(4))
    y = (a + np.roll(c, 1) + np.roll(d, 1)) % 2
    one = directed_info_emp(qs(a), qs(y), [qs(c), qs(d)], depth=1)
    two = directed_info_emp(qs(a), qs(y), [qs(d), qs(c)], depth=1)
    assert one == pytest.approx(two, abs=1e-12)


def test_accepts_raw_arrays_and_empty_rest():
    i_val, h_val = directed_info_emp(np.array([0, 1, 1, 0, 1]), np.array([0, 0, 1, 1, 0]))
    assert 0 <= i_val <= h_val


def test_raw_flow_series_rejected():
    with pytest.raises((TypeError, ValueError)):
        directed_info_emp(FlowSeries("a", [0, 5]), qs([0, 1]))
