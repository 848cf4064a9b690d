import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from vistream.classify import RandomForest, Tree, train_rf
from vistream.classify.forest import resolve_max_features, score_splits


def entropy_cost(counts):
    n = sum(counts)
    return sum(-c * math.log(c / n) for c in counts if c)


def brute_best_splits(X, y, w, k):
    """Per column: (cost, threshold) of the best midpoint split, scanning every threshold."""
    out = {}
    for j in range(X.shape[1]):
        values = sorted(set(X[:, j]))
        best = None
        for lo, hi in zip(values, values[1:]):
            t = (lo + hi) / 2
            left = [0.0] * k
            right = [0.0] * k
            for x, c, wt in zip(X[:, j], y, w):
                (left if x <= t else right)[c] += wt
            cost = entropy_cost(left) + entropy_cost(right)
            if best is None or cost < best[0] - 1e-12:
                best = (cost, t)
        out[j] = best
    return out


@settings(max_examples=150, deadline=None)
@given(
    st.integers(2, 9).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=n, max_size=n),
            st.lists(st.integers(0, 2), min_size=n, max_size=n),
            st.lists(st.integers(1, 3), min_size=n, max_size=n),
        )
    )
)
def test_score_splits_matches_enumeration(data):
    rows, y, w = data
    X = np.array(rows, dtype=float)
    y = np.array(y)
    w = np.array(w, dtype=float)
    hist = np.bincount(y, weights=w, minlength=3)
    S = sp.coo_matrix(X)
    wvec = np.zeros((S.nnz, 3))
    wvec[np.arange(S.nnz), y[S.row]] = w[S.row]
    cost, thr, valid = score_splits(S.col, S.data, wvec, 3, hist)
    expected = brute_best_splits(X, y, w, 3)
    for j in range(3):
        if expected[j] is None:
            assert not valid[j]
        else:
            assert valid[j]
            assert cost[j] == pytest.approx(expected[j][0], abs=1e-9)
            assert thr[j] == expected[j][1]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_root_split_is_optimal(seed):
    rng = np.random.default_rng(seed)
    X = rng.poisson(0.8, size=(12, 4)).astype(float)
    y = rng.integers(0, 3, size=12)
    m = RandomForest(n_estimators=1, max_features=None, bootstrap=False).fit(X, y)
    tree = m.estimators_[0]
    expected = brute_best_splits(X, y, np.ones(12), 3)
    costs = [c for c, _ in filter(None, expected.values())]
    if len(set(y)) == 1 or not costs:
        assert tree.n_nodes == 1
        return
    f, t = tree.feature[0], tree.threshold[0]
    assert expected[f] is not None
    assert expected[f][0] == pytest.approx(min(costs), abs=1e-9)


def test_four_points_single_tree():
    X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
    y = [0, 1, 2, 2]
    m = RandomForest(n_estimators=1, max_features=None, bootstrap=False).fit(X, y)
    assert (m.predict(X) == y).all()


def test_pure_labels():
    X = np.random.default_rng(0).poisson(1, size=(20, 5)).astype(float)
    m = train_rf(X, [1] * 20, n_estimators=5)
    proba = m.predict_proba(np.random.default_rng(1).poisson(1, size=(7, 5)).astype(float))
    assert (proba[:, 1] == 1.0).all()


def test_deterministic():
    rng = np.random.default_rng(2)
    X = sp.csr_matrix(rng.poisson(0.5, size=(60, 30)).astype(float))
    y = rng.integers(0, 3, size=60)
    Q = sp.csr_matrix(rng.poisson(0.5, size=(40, 30)).astype(float))
    a = train_rf(X, y, n_estimators=10, seed=42).predict_proba(Q)
    b = train_rf(X, y, n_estimators=10, seed=42).predict_proba(Q)
    assert np.array_equal(a, b)
    c = train_rf(X, y, n_estimators=10, seed=43).predict_proba(Q)
    assert not np.array_equal(a, c)


def test_tree_seeds_are_per_index():
    rng = np.random.default_rng(3)
    X = sp.csr_matrix(rng.poisson(0.5, size=(50, 20)).astype(float))
    y = rng.integers(0, 3, size=50)
    small = train_rf(X, y, n_estimators=3, seed=7)
    big = train_rf(X, y, n_estimators=6, seed=7)
    for a, b in zip(small.estimators_, big.estimators_):
        assert np.array_equal(a.feature, b.feature) and np.array_equal(a.value, b.value)


def test_leaf_histograms_sum_to_draws():
    rng = np.random.default_rng(4)
    X = sp.csr_matrix(rng.poisson(0.5, size=(40, 10)).astype(float))
    y = rng.integers(0, 3, size=40)
    m = train_rf(X, y, n_estimators=4, seed=1)
    for tree in m.estimators_:
        assert tree.value[0].sum() == 40
        for node in range(tree.n_nodes):
            if tree.feature[node] >= 0:
                kids = tree.value[tree.left[node]] + tree.value[tree.right[node]]
                assert np.allclose(kids, tree.value[node])


def leaf(hist):
    return Tree(np.array([-1]), np.zeros(1), np.array([-1]), np.array([-1]), np.array([hist], dtype=float))


def test_two_tree_vote_tie():
    m = RandomForest.from_trees([leaf([1.0, 0.0]), leaf([0.0, 1.0])], n_classes=2, n_features=1)
    assert m.predict_proba([[0.0]]).tolist() == [[0.5, 0.5]]
    assert m.predict([[0.0]]).tolist() == [0]


def test_probabilities_sum_to_one():
    rng = np.random.default_rng(5)
    X = sp.csr_matrix(rng.poisson(0.5, size=(80, 25)).astype(float))
    y = rng.integers(0, 3, size=80)
    p = train_rf(X, y, n_estimators=8).predict_proba(X)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)


def test_defaults():
    m = RandomForest()
    assert (m.n_estimators, m.criterion, m.random_state) == (400, "entropy", 42)


@pytest.mark.parametrize("kwargs", [{"n_estimators": 0}, {"criterion": "gini"}, {"min_samples_split": 1}])
def test_param_validation(kwargs):
    with pytest.raises(ValueError):
        RandomForest(**kwargs).fit(np.eye(3), [0, 1, 2])


@pytest.mark.parametrize("rule,n,expected", [("sqrt", 10, 3), ("sqrt", 1, 1), ("log2", 9, 3), (None, 7, 7), (4, 3, 3)])
def test_resolve_max_features(rule, n, expected):
    assert resolve_max_features(rule, n) == expected


def test_min_samples_split_stops_growth():
    X = np.arange(10, dtype=float)[:, None]
    y = [0, 1] * 5
    m = RandomForest(n_estimators=1, bootstrap=False, max_features=None, min_samples_split=11).fit(X, y)
    assert m.estimators_[0].n_nodes == 1
