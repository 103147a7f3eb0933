import math

import numpy as np
import pytest

from dga_emd.boosting import (
    BoostedEnsemble,
    Leaf,
    Split,
    TrainConfig,
    best_split,
    gradients_multiclass,
    grow_tree,
    iter_leaves,
    log_loss,
    predict,
    route,
    softmax_probabilities,
    train,
    tree_depth,
)
from dga_emd.errors import DimensionMismatch, SingleClassData

from oracles import exhaustive_best_split


def test_softmax_examples():
    np.testing.assert_allclose(softmax_probabilities(np.zeros(6)), np.full(6, 1 / 6), atol=1e-15)
    p = softmax_probabilities([1000.0, 0.0])
    assert np.all(np.isfinite(p)) and p[0] == pytest.approx(1) and p[1] == pytest.approx(0)
    p = softmax_probabilities([math.log(2), 0.0])
    np.testing.assert_allclose(p, [2 / 3, 1 / 3], atol=1e-12)
    assert p.sum() == pytest.approx(1, abs=1e-12)


def test_gradient_examples():
    g, h = gradients_multiclass(np.full(6, 1 / 6), 0)
    np.testing.assert_allclose(g, [-5 / 6] + [1 / 6] * 5, atol=1e-15)
    np.testing.assert_allclose(h, np.full(6, 5 / 36), atol=1e-15)
    g, _ = gradients_multiclass(np.eye(6)[2], 2)
    np.testing.assert_array_equal(g, 0)
    g, h = gradients_multiclass([2 / 3, 1 / 3], 1)
    np.testing.assert_allclose(g, [2 / 3, -2 / 3], atol=1e-15)
    np.testing.assert_allclose(h, [2 / 9, 2 / 9], atol=1e-15)


def test_single_sample_leaf():
    t = grow_tree([[1.0]], [0.5], [0.25], TrainConfig(l2_lambda=1.0))
    assert t == Leaf(-0.4)


def test_equal_gradients_give_single_leaf(rng):
    X = rng.normal(size=(30, 3))
    t = grow_tree(X, np.full(30, 0.3), np.full(30, 0.2), TrainConfig(min_child_hessian=0))
    assert isinstance(t, Leaf)


def test_toy_split_matches_enumeration():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    g = np.array([-1.0, -0.5, 0.7, 1.0])
    h = np.array([0.25, 0.25, 0.25, 0.25])
    cfg = TrainConfig(min_child_hessian=0, max_depth=1)
    oracle = exhaustive_best_split(X, g, h, 1.0)
    assert oracle is not None and oracle[2] == 2.5
    t = grow_tree(X, g, h, cfg)
    assert isinstance(t, Split)
    assert (t.feature_index, t.threshold) == (oracle[1], oracle[2])


@pytest.mark.parametrize("min_child_hessian", [0.0, 1.0])
def test_root_split_oracle_equivalence(min_child_hessian):
    rng = np.random.default_rng(7)
    agree = 0
    for _ in range(100):
        m = int(rng.integers(1, 21))
        f = int(rng.integers(1, 4))
        X = rng.integers(0, 6, size=(m, f)).astype(float)
        g = rng.normal(size=m)
        h = rng.uniform(0.05, 1.0, size=m)
        cfg = TrainConfig(min_child_hessian=min_child_hessian)
        got = best_split(X, g, h, cfg)
        want = exhaustive_best_split(X, g.tolist(), h.tolist(), cfg.l2_lambda,
                                     min_child_hessian=min_child_hessian)
        if want is None:
            assert got is None
        else:
            assert got is not None
            assert (got.feature_index, got.threshold) == (want[1], want[2])
            assert got.gain == pytest.approx(want[0], rel=1e-9, abs=1e-12)
        agree += 1
    assert agree == 100


def leaf_rows(tree, X):
    groups = {}
    for i, x in enumerate(X):
        groups.setdefault(id(route(tree, x)), []).append(i)
    return groups


def test_leaf_weight_identity(rng):
    X = rng.normal(size=(120, 4))
    g = rng.normal(size=120)
    h = rng.uniform(0.1, 0.3, size=120)
    cfg = TrainConfig(max_depth=4, l2_lambda=1.0)
    tree = grow_tree(X, g, h, cfg)
    groups = leaf_rows(tree, X)
    leaves = list(iter_leaves(tree))
    assert len(groups) == len(leaves) > 1
    for leaf in leaves:
        rows = groups[id(leaf)]
        assert leaf.weight == pytest.approx(-g[rows].sum() / (h[rows].sum() + 1.0), abs=1e-12)
    assert tree_depth(tree) <= cfg.max_depth


def separable_set(rng, n=50):
    a = rng.normal([-2, -2], 0.6, size=(n, 2))
    b = rng.normal([2, 2], 0.6, size=(n, 2))
    return np.vstack([a, b]), np.r_[np.zeros(n, int), np.ones(n, int)]


def test_separable_set_fits(rng):
    X, y = separable_set(rng)
    m = train(X, y, TrainConfig(rounds=200))
    assert np.array_equal(m.predict_classes(X), y)
    for x, label in zip(X[:5], y[:5]):
        probs, cls = predict(m, x)
        assert cls == label and probs.sum() == pytest.approx(1, abs=1e-12)


def test_training_is_deterministic(rng):
    X, y = separable_set(rng)
    probe = rng.normal(size=(40, 2)) * 3
    a = train(X, y, TrainConfig(rounds=20)).predict_proba(probe)
    b = train(X, y, TrainConfig(rounds=20)).predict_proba(probe)
    assert a.tobytes() == b.tobytes()


def test_one_round_stump_matches_hand_computation(rng):
    X, y = separable_set(rng, 20)
    cfg = TrainConfig(rounds=1, max_depth=1, min_child_hessian=0)
    model = train(X, y, cfg)
    # one boosting step from zero logits: p = 1/2, g = p - onehot, h = 1/4
    scores = np.zeros((len(y), 2))
    for c in range(2):
        g = 0.5 - (y == c)
        h = np.full(len(y), 0.25)
        best = exhaustive_best_split(X, g.tolist(), h.tolist(), 1.0)
        gain, f, thr = best
        left = X[:, f] < thr
        w_left = -g[left].sum() / (h[left].sum() + 1.0)
        w_right = -g[~left].sum() / (h[~left].sum() + 1.0)
        scores[:, c] = 0.3 * np.where(left, w_left, w_right)
    expected = np.exp(scores) / np.exp(scores).sum(axis=1, keepdims=True)
    np.testing.assert_allclose(model.predict_proba(X), expected, atol=1e-12)


def test_empty_ensemble_is_uniform():
    m = BoostedEnsemble(6, 3)
    probs, cls = predict(m, [0.0, 1.0, 2.0])
    np.testing.assert_allclose(probs, np.full(6, 1 / 6))
    assert cls == 0


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        predict(BoostedEnsemble(2, 3), [1.0, 2.0])


def test_single_class_rejected():
    with pytest.raises(SingleClassData):
        train(np.zeros((5, 2)), np.zeros(5, int), n_classes=3)


def test_rectangular_rounds():
    with pytest.raises(ValueError):
        BoostedEnsemble(2, 1, ((Leaf(0.0),),))


def test_row_order_invariance(rng):
    X = rng.normal(size=(80, 3))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(int) + (X[:, 2] > 1).astype(int)
    perm = rng.permutation(80)
    cfg = TrainConfig(rounds=15)
    a = train(X, y, cfg, n_classes=3)
    b = train(X[perm], y[perm], cfg, n_classes=3)
    probe = rng.normal(size=(200, 3))
    np.testing.assert_array_equal(a.predict_classes(probe), b.predict_classes(probe))
    np.testing.assert_allclose(a.predict_proba(probe), b.predict_proba(probe), atol=1e-9)


def test_loss_non_increasing(rng):
    X = rng.normal(size=(150, 5))
    y = np.digitize(X[:, 0] + 0.3 * rng.normal(size=150), [-1, -0.3, 0.3, 1])
    losses = []
    m = train(X, y, TrainConfig(rounds=60), n_classes=5, record_loss=losses)
    assert len(losses) == 61
    assert np.all(np.diff(losses) <= 1e-9)
    assert losses[-1] == pytest.approx(log_loss(m, X, y), abs=1e-12)


def test_config_validation():
    for bad in (dict(rounds=0), dict(max_depth=0), dict(learning_rate=0), dict(learning_rate=1.5),
                dict(l2_lambda=-1)):
        with pytest.raises(ValueError):
            TrainConfig(**bad)
