from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_softmax, softmax

from ._base import BaseClassifier, as_matrix, check_labels


class DivergenceError(ArithmeticError):
    pass


def softmax_loss_grad(W: np.ndarray, b: np.ndarray, X, y: np.ndarray, l2: float):
    """Mean cross-entropy of ``softmax(X W^T + b)`` plus ``l2/2 * ||W||^2``.

    Returns ``(loss, dW, db)``. The bias is not penalised.
    """
    n = X.shape[0]
    logits = np.asarray(X @ W.T) + b
    logp = log_softmax(logits, axis=1)
    loss = -logp[np.arange(n), y].mean() + 0.5 * l2 * np.sum(W * W)
    resid = np.exp(logp)
    resid[np.arange(n), y] -= 1.0
    resid /= n
    dW = np.asarray(X.T @ resid).T + l2 * W
    db = resid.sum(axis=0)
    return loss, dW, db


class SoftmaxRegression(BaseClassifier):
    """Multinomial logistic regression fitted with L-BFGS from a zero start.

    Parameters
    ----------
    l2 : float, optional
        Ridge penalty on the weights. ``None`` uses ``1/n_samples``, which on
        the mean loss matches a unit inverse-regularisation strength.
    max_iter : int
    tol : float
        Stop once the largest absolute gradient entry is at most ``tol``.

    Attributes
    ----------
    coef_, intercept_ : fitted weights and biases
    n_iter_, grad_norm_, stop_reason_ : optimiser report
    loss_history_ : objective value after each iteration, starting at the zero model
    """

    kind = "lr"

    def __init__(self, l2: float | None = None, max_iter: int = 1000, tol: float = 1e-5, n_classes: int | None = None):
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.n_classes = n_classes

    def fit(self, X, y):
        X = as_matrix(X)
        y, k = check_labels(y, X.shape[0], self.n_classes)
        n, d = X.shape
        l2 = 1.0 / n if self.l2 is None else float(self.l2)
        if l2 < 0:
            raise ValueError("l2 must be >= 0")

        def objective(theta):
            W = theta[: k * d].reshape(k, d)
            loss, dW, db = softmax_loss_grad(W, theta[k * d :], X, y, l2)
            if not np.isfinite(loss):
                raise DivergenceError("non-finite loss during optimisation")
            return loss, np.concatenate([dW.ravel(), db])

        history = [objective(np.zeros(k * (d + 1)))[0]]
        res = minimize(
            objective,
            np.zeros(k * (d + 1)),
            jac=True,
            method="L-BFGS-B",
            callback=lambda intermediate_result: history.append(float(intermediate_result.fun)),
            options={"maxiter": self.max_iter, "gtol": self.tol, "ftol": 1e-15, "maxls": 50},
        )
        theta = res.x
        self._set_classes(k, d)
        self.coef_ = theta[: k * d].reshape(k, d).copy()
        self.intercept_ = theta[k * d :].copy()
        grad = objective(theta)[1]
        self.grad_norm_ = float(np.max(np.abs(grad)))
        self.n_iter_ = int(res.nit)
        if self.grad_norm_ <= self.tol:
            self.stop_reason_ = "gradient_tolerance"
        elif res.nit >= self.max_iter:
            self.stop_reason_ = "max_iter"
        else:
            self.stop_reason_ = "stalled"
        self.loss_history_ = history
        return self

    def decision_function(self, X) -> np.ndarray:
        X = as_matrix(X, self.n_features_in_)
        return np.asarray(X @ self.coef_.T) + self.intercept_

    def _proba(self, X):
        return softmax(np.asarray(X @ self.coef_.T) + self.intercept_, axis=1)


def train_lr(X, y, max_iter: int = 1000, tol: float = 1e-5, l2: float | None = None) -> SoftmaxRegression:
    return SoftmaxRegression(l2=l2, max_iter=max_iter, tol=tol).fit(X, y)
