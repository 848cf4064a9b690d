import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from vistream.classify import (
    ModelFormatError,
    MultinomialNB,
    RandomForest,
    ShapeError,
    SoftmaxRegression,
    dumps_model,
    load_model,
    loads_model,
    make_model,
    predict,
    save_model,
)
from vistream.features import SparseVector


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(0)
    X = sp.csr_matrix(rng.poisson(0.7, size=(90, 12)).astype(float))
    y = rng.integers(0, 3, size=90)
    Q = sp.csr_matrix(rng.poisson(0.7, size=(30, 12)).astype(float))
    return X, y, Q


MODELS = {
    "nb": lambda: MultinomialNB(alpha=0.5),
    "lr": lambda: SoftmaxRegression(),
    "rf": lambda: RandomForest(n_estimators=5, random_state=3),
}


@pytest.mark.parametrize("kind", sorted(MODELS))
def test_round_trip_bit_identical(kind, data, tmp_path):
    X, y, Q = data
    m = MODELS[kind]().fit(X, y)
    save_model(m, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert np.array_equal(back.predict_proba(Q), m.predict_proba(Q))
    assert type(back) is type(m)
    obj = json.loads((tmp_path / "m.json").read_text())
    assert obj["version"] == 1 and obj["kind"] == kind
    assert (obj["n_classes"], obj["n_features"]) == (3, 12)
    assert dumps_model(back) == dumps_model(m)


def test_rf_trees_nested(data):
    X, y, _ = data
    obj = json.loads(dumps_model(RandomForest(n_estimators=2).fit(X, y)))
    root = obj["payload"]["trees"][0]
    assert {"feature", "threshold", "left", "right"} <= set(root)


def test_deep_tree_round_trip():
    # a chain-shaped tree deeper than the default recursion limit
    n = 1500
    X = np.arange(n, dtype=float)[:, None]
    y = np.arange(n) % 2
    m = RandomForest(n_estimators=1, bootstrap=False, max_features=None).fit(X, y)
    assert m.estimators_[0].depth() > 1000
    back = loads_model(dumps_model(m))
    assert np.array_equal(back.predict_proba(X), m.predict_proba(X))


def test_unknown_version(data, tmp_path):
    X, y, _ = data
    obj = json.loads(dumps_model(MultinomialNB().fit(X, y)))
    obj["version"] = 99
    (tmp_path / "m.json").write_text(json.dumps(obj))
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "m.json")


@pytest.mark.parametrize("kind", sorted(MODELS))
def test_truncated_file(kind, data, tmp_path):
    X, y, _ = data
    text = dumps_model(MODELS[kind]().fit(X, y))
    for cut in (0, 1, len(text) // 2, len(text) - 1):
        (tmp_path / "m.json").write_text(text[:cut])
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "m.json")


@pytest.mark.parametrize(
    "obj",
    [[], {"version": 1}, {"version": 1, "kind": "svm", "n_classes": 3, "n_features": 2, "payload": {}},
     {"version": 1, "kind": "nb", "n_classes": 3, "n_features": 2, "payload": {"alpha": 1}}],
)
def test_malformed(obj):
    with pytest.raises(ModelFormatError):
        loads_model(json.dumps(obj))


def test_binary_garbage(tmp_path):
    (tmp_path / "m.json").write_bytes(b"\xff\xfe\x00garbage")
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "m.json")


@pytest.mark.parametrize("kind", sorted(MODELS))
def test_shape_error(kind, data):
    X, y, _ = data
    m = MODELS[kind]().fit(X, y)
    with pytest.raises(ShapeError):
        m.predict_proba(np.zeros((1, 5)))
    with pytest.raises(ShapeError):
        predict(m, SparseVector(4))


@pytest.mark.parametrize("kind", sorted(MODELS))
def test_probabilities_normalised_and_argmax(kind, data):
    X, y, Q = data
    m = MODELS[kind]().fit(X, y)
    p = m.predict_proba(Q)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)
    assert np.array_equal(m.predict(Q), np.argmax(p, axis=1))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3).filter(lambda v: sum(v) > 0), st.floats(1e-3, 1e3))
def test_argmax_scale_invariant(p, c):
    p = np.array(p)
    assert np.argmax(p / p.sum()) == np.argmax(c * p / (c * p).sum())


def test_make_model():
    assert isinstance(make_model("nb", alpha=0.3), MultinomialNB)
    with pytest.raises(ValueError):
        make_model("svm")


@pytest.mark.parametrize("kind", sorted(MODELS))
def test_sklearn_params(kind):
    from sklearn.base import clone

    m = MODELS[kind]()
    assert clone(m).get_params() == m.get_params()
