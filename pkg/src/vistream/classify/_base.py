from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..features import SparseVector, to_csr


class ShapeError(ValueError):
    pass


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class Prediction:
    label: int
    probabilities: tuple[float, ...]


def _dense_to_csr(A: np.ndarray) -> sp.csr_matrix:
    rows, cols = np.nonzero(A)
    indptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=A.shape[0]))])
    return sp.csr_matrix((A[rows, cols], cols.astype(np.int32), indptr), shape=A.shape)


def as_matrix(X, n_features: int | None = None) -> sp.csr_matrix:
    """Coerce a batch (sequence of SparseVector, array or sparse matrix) to CSR float64."""
    if isinstance(X, SparseVector):
        X = [X]
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], SparseVector):
        X = to_csr(X)
    elif isinstance(X, sp.csr_matrix) and X.dtype == np.float64:
        pass
    elif isinstance(X, np.ndarray) and X.ndim == 2 and X.dtype.kind in "fiu":
        # plain dense arrays skip the generic validator, which dominates on tiny inputs
        A = np.asarray(X, dtype=np.float64)
        if not np.isfinite(A).all():
            raise ValueError("input contains NaN or infinity")
        X = _dense_to_csr(A)
    else:
        X = sp.csr_matrix(check_array(X, accept_sparse="csr", dtype=np.float64))
    if n_features is not None and X.shape[1] != n_features:
        raise ShapeError(f"input has {X.shape[1]} features, model expects {n_features}")
    return X


def check_labels(y, n_samples: int, n_classes: int | None) -> tuple[np.ndarray, int]:
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != n_samples:
        raise ShapeError(f"expected {n_samples} labels, got shape {y.shape}")
    if n_samples == 0:
        raise TrainingError("no training samples")
    if y.dtype.kind not in "iu" and not (y.dtype.kind == "f" and np.array_equal(y, np.floor(y))):
        raise TrainingError("labels must be non-negative integers")
    y = y.astype(np.intp)
    lo, hi = int(y.min()), int(y.max())
    if lo < 0:
        raise TrainingError("labels must be non-negative integers")
    k = hi + 1 if n_classes is None else n_classes
    if hi >= k:
        raise TrainingError(f"label {hi} outside {k} classes")
    return y, k


class BaseClassifier(ClassifierMixin, BaseEstimator):
    """Shared predict/predict_proba plumbing; subclasses supply ``_proba``."""

    kind: str = ""

    def _set_classes(self, n_classes: int, n_features: int):
        self.n_classes_ = n_classes
        self.n_features_in_ = n_features
        self.classes_ = np.arange(n_classes)

    def predict_proba(self, X) -> np.ndarray:
        if not hasattr(self, "n_features_in_"):
            check_is_fitted(self, "n_features_in_")
        return self._proba(as_matrix(X, self.n_features_in_))

    def predict(self, X) -> np.ndarray:
        # argmax returns the first maximum: lowest class index wins ties
        return np.argmax(self.predict_proba(X), axis=1)

    def _proba(self, X: sp.csr_matrix) -> np.ndarray:
        raise NotImplementedError

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.sparse = True
        return tags


def predict_batch(model: BaseClassifier, X) -> list[Prediction]:
    proba = model.predict_proba(X)
    labels = np.argmax(proba, axis=1)
    return [Prediction(int(k), tuple(float(p) for p in row)) for k, row in zip(labels, proba)]


def predict(model: BaseClassifier, x: SparseVector | Sequence[float]) -> Prediction:
    X = [x] if isinstance(x, SparseVector) else np.atleast_2d(np.asarray(x, dtype=np.float64))
    return predict_batch(model, X)[0]
