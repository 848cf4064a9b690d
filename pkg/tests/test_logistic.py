import numpy as np
import pytest
import scipy.sparse as sp

from vistream.classify import SoftmaxRegression, softmax_loss_grad, train_lr


def numeric_grad(W, b, X, y, l2, h=1e-5):
    def f(W_, b_):
        return softmax_loss_grad(W_, b_, X, y, l2)[0]

    gW = np.zeros_like(W)
    for idx in np.ndindex(*W.shape):
        up, dn = W.copy(), W.copy()
        up[idx] += h
        dn[idx] -= h
        gW[idx] = (f(up, b) - f(dn, b)) / (2 * h)
    gb = np.zeros_like(b)
    for i in range(len(b)):
        up, dn = b.copy(), b.copy()
        up[i] += h
        dn[i] -= h
        gb[i] = (f(W, up) - f(W, dn)) / (2 * h)
    return gW, gb


def rel_err(a, b):
    return np.max(np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b))))


def random_problem(rng, sparse=False):
    n, d, k = rng.integers(3, 12), rng.integers(1, 6), rng.integers(2, 4)
    X = rng.poisson(1.0, size=(n, d)).astype(float)
    y = rng.integers(0, k, size=n)
    W, b = rng.normal(size=(k, d)), rng.normal(size=k)
    return (sp.csr_matrix(X) if sparse else X), y, W, b


@pytest.mark.parametrize("seed", range(10))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X, y, W, b = random_problem(rng, sparse=seed % 2 == 0)
    l2 = float(rng.uniform(0, 0.5))
    _, dW, db = softmax_loss_grad(W, b, X, y, l2)
    nW, nb = numeric_grad(W, b, X, y, l2)
    assert rel_err(dW, nW) < 1e-5
    assert rel_err(db, nb) < 1e-5


def test_zero_model_uniform():
    X = np.eye(3)
    loss, _, _ = softmax_loss_grad(np.zeros((3, 3)), np.zeros(3), X, np.array([0, 1, 2]), 0.0)
    assert loss == pytest.approx(np.log(3))
    m = SoftmaxRegression(max_iter=50).fit(X, [0, 1, 2])
    assert m.loss_history_[0] == pytest.approx(np.log(3))
    m.coef_[:] = 0
    m.intercept_[:] = 0
    assert np.allclose(m.predict_proba(X), 1 / 3)


def test_separable_points():
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    m = train_lr(X, [0, 1], l2=0.0, max_iter=200)
    assert (m.predict(X) == [0, 1]).all()
    assert np.isfinite(m.coef_).all()


def test_converges_and_reports():
    rng = np.random.default_rng(3)
    X = rng.poisson(1.0, size=(60, 5)).astype(float)
    y = rng.integers(0, 3, size=60)
    m = SoftmaxRegression(tol=1e-6).fit(X, y)
    assert m.stop_reason_ == "gradient_tolerance"
    assert m.grad_norm_ <= 1e-6
    assert m.n_iter_ >= 1


def test_max_iter_reported():
    rng = np.random.default_rng(4)
    X = rng.poisson(1.0, size=(40, 5)).astype(float)
    y = rng.integers(0, 3, size=40)
    m = SoftmaxRegression(max_iter=2, tol=1e-12).fit(X, y)
    assert m.stop_reason_ == "max_iter"


@pytest.mark.parametrize("seed", range(5))
def test_loss_monotone(seed):
    rng = np.random.default_rng(seed)
    X = rng.poisson(1.0, size=(50, 5)).astype(float)
    y = rng.integers(0, 3, size=50)
    hist = SoftmaxRegression(l2=0.01).fit(X, y).loss_history_
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_matches_sklearn_with_unit_c():
    from sklearn.linear_model import LogisticRegression

    rng = np.random.default_rng(5)
    X = rng.poisson(1.0, size=(80, 4)).astype(float)
    y = rng.integers(0, 3, size=80)
    ours = SoftmaxRegression(tol=1e-8).fit(X, y)
    ref = LogisticRegression(C=1.0, tol=1e-10, max_iter=5000).fit(X, y)
    assert np.allclose(ours.predict_proba(X), ref.predict_proba(X), atol=1e-4)


def test_negative_l2():
    with pytest.raises(ValueError):
        SoftmaxRegression(l2=-1).fit(np.eye(2), [0, 1])
