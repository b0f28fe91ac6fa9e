import numpy as np
import pytest

from _oracles import ctw_depth1_predictions
from trafficdig.ctw import (ContextTreeModel, causally_conditioned_entropy_ct, ct_predict,
                            ct_update, ctw_sequential, directed_info_and_entropy_ct,
                            directed_info_ct)
from trafficdig.empirical import directed_info_emp


def test_fresh_model_is_uniform():
    model = ContextTreeModel(4, 3)
    assert np.allclose(ct_predict(model, (1, 2, 3)), 0.25)


def test_kt_root_arithmetic():
    model = ContextTreeModel(2, 0)
    for _ in range(3):
        ct_update(model, (), 0)
    assert ct_predict(model, ())[0] == pytest.approx(7 / 8)


def test_alternating_sequence_is_learned():
    model = ContextTreeModel(2, 1)
    prev = []
    for i in range(1000):
        s = i % 2
        model.update(prev[-1:], s)
        prev.append(s)
    assert ct_predict(model, [1])[0] >= 0.99
    assert ct_predict(model, [0])[1] >= 0.99


def test_first_steps_match_block_oracle():
    seq = [0, 1, 0, 1, 0, 1, 0, 1]
    model = ContextTreeModel(2, 1)
    got = []
    for i, s in enumerate(seq):
        ctx = seq[:i][::-1][:1]
        got.append(model.predict(ctx)[s])
        model.update(ctx, s)
    assert np.allclose(got, ctw_depth1_predictions(seq), atol=1e-12)


def test_update_raises_probability():
    model = ContextTreeModel(3, 2)
    before = model.predict((1, 0))[2]
    model.update((1, 0), 2)
    assert model.predict((1, 0))[2] > before


def test_determinism_and_touch_budget():
    seq = np.random.default_rng(0).integers(0, 3, 400)
    a, b = ContextTreeModel(3, 2), ContextTreeModel(3, 2)
    a.log2_probability(seq)
    b.log2_probability(seq)
    assert a.touches == b.touches <= len(seq) * 3
    assert all(np.array_equal(a.nodes[k].counts, b.nodes[k].counts) for k in a.nodes)


def test_rejects_bad_symbols():
    model = ContextTreeModel(2, 1)
    with pytest.raises(ValueError):
        model.update((), 2)
    with pytest.raises(ValueError):
        model.predict((5,))


def test_batch_kernel_matches_reference():
    w = np.random.default_rng(1).integers(0, 5, 2000)
    batch = ctw_sequential(w, 5, 3)
    model, ref = ContextTreeModel(5, 3), []
    for i, s in enumerate(w):
        ctx = w[:i][::-1][:3]
        ref.append(model.predict(ctx))
        model.update(ctx, s)
    assert np.allclose(batch, ref, atol=1e-12)
    assert np.allclose(batch.sum(axis=1), 1.0, atol=1e-12)


def test_independent_is_near_zero():
    rng = np.random.default_rng(2)
    x, y = rng.integers(0, 2, 100_000), rng.integers(0, 2, 100_000)
    assert directed_info_ct(x, y, depth=1) <= 0.02


def test_copy_channel_is_one_bit():
    x = np.random.default_rng(3).integers(0, 2, 100_000)
    y = np.concatenate([[0], x[:-1]])
    i_val, h_val = directed_info_and_entropy_ct(x, y, depth=1)
    assert i_val == pytest.approx(1.0, abs=0.05)
    assert i_val <= h_val


def test_entropy_cases():
    rng = np.random.default_rng(4)
    x = rng.integers(0, 2, 10_000)
    assert causally_conditioned_entropy_ct(x, np.zeros_like(x), depth=1) <= 0.05
    y = rng.integers(0, 2, 100_000)
    x = rng.integers(0, 2, 100_000)
    assert causally_conditioned_entropy_ct(x, y, depth=1) == pytest.approx(1.0, abs=0.02)


def test_burn_in_zero_allowed_and_too_long_rejected():
    x = np.random.default_rng(5).integers(0, 2, 300)
    directed_info_ct(x, x, depth=1, burn_in=0)
    with pytest.raises(ValueError):
        directed_info_ct(x, x, depth=1, burn_in=300)


def test_agrees_with_plug_in_on_markov_data():
    from _oracles import sample_markov_triple
    x, y, z = sample_markov_triple(100_000, seed=11)
    ct = directed_info_ct(x, y, [z], depth=1)
    emp, _ = directed_info_emp(x, y, [z], depth=1)
    assert abs(ct - emp) <= 0.05
