from __future__ import annotations

import numpy as np

from ._base import BaseClassifier, TrainingError, as_matrix, check_labels


class MultinomialNB(BaseClassifier):
    """Multinomial naive Bayes with additive (Laplace) smoothing.

    Parameters
    ----------
    alpha : float
        Additive smoothing; must be positive.
    n_classes : int, optional
        Number of classes. Inferred as ``max(y) + 1`` when omitted; every
        class must appear in the training labels.

    Attributes
    ----------
    class_log_prior_ : ndarray of shape (n_classes,)
    feature_log_prob_ : ndarray of shape (n_classes, n_features)
    """

    kind = "nb"

    def __init__(self, alpha: float = 1.0, n_classes: int | None = None):
        self.alpha = alpha
        self.n_classes = n_classes

    def fit(self, X, y):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        X = as_matrix(X)
        if X.nnz and X.data.min() < 0:
            raise ValueError("naive Bayes needs non-negative counts")
        y, k = check_labels(y, X.shape[0], self.n_classes)
        class_count = np.bincount(y, minlength=k).astype(np.float64)
        if (class_count == 0).any():
            missing = np.flatnonzero(class_count == 0).tolist()
            raise TrainingError(f"classes {missing} have no training samples")
        n_feat = X.shape[1]
        row_class = np.repeat(y, np.diff(X.indptr))
        feature_count = np.bincount(
            row_class * n_feat + X.indices, weights=X.data, minlength=k * n_feat
        ).reshape(k, n_feat)
        smoothed = feature_count + self.alpha
        self._set_classes(k, X.shape[1])
        self.class_count_ = class_count
        self.feature_count_ = feature_count
        self.class_log_prior_ = np.log(class_count) - np.log(class_count.sum())
        self.feature_log_prob_ = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = as_matrix(X, self.n_features_in_)
        return np.asarray(X @ self.feature_log_prob_.T) + self.class_log_prior_

    def _proba(self, X):
        jll = np.asarray(X @ self.feature_log_prob_.T) + self.class_log_prior_
        jll -= jll.max(axis=1, keepdims=True)
        p = np.exp(jll)
        return p / p.sum(axis=1, keepdims=True)


def train_nb(X, y, alpha: float = 1.0) -> MultinomialNB:
    return MultinomialNB(alpha=alpha).fit(X, y)
