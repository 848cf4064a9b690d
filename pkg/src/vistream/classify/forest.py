"""Random forest of unpruned entropy trees over sparse count features.

Each tree sees a bootstrap sample, held as per-row draw counts rather than
duplicated rows. At a node only features that occur in the node's rows are
candidates; they are visited in a seeded random order and the search stops
once ``max_features`` of them have offered a valid split. Thresholds sit at
midpoints between consecutive distinct values; ``x <= threshold`` goes left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import xlogy

from .._rng import SplitMix64
from ._base import BaseClassifier, as_matrix, check_labels

_PREDICT_CHUNK = 1024


@dataclass
class Tree:
    """Flat array form; ``feature[i] == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (n_nodes, n_classes) weighted class counts

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        best, stack = 0, [(0, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            if self.feature[node] >= 0:
                stack.append((self.left[node], d + 1))
                stack.append((self.right[node], d + 1))
        return best

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index for each row of a dense matrix."""
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                return node
            r, n = rows[active], node[active]
            go_left = X[r, f[active]] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])

    def leaf_proba(self, X: np.ndarray) -> np.ndarray:
        v = self.value[self.apply(X)]
        return v / v.sum(axis=1, keepdims=True)


def _weighted_entropy(counts: np.ndarray) -> np.ndarray:
    """``n * H(p)`` along the last axis, i.e. ``n log n - sum c log c``."""
    n = counts.sum(axis=-1)
    return xlogy(n, n) - xlogy(counts, counts).sum(axis=-1)


def score_splits(col, val, wvec, n_cols, hist):
    """Best threshold per column from the nonzero entries of a node.

    ``col``/``val``/``wvec`` describe stored entries (chunk-local column,
    value, weighted one-hot class vector). Rows without an entry in a column
    form one implicit group at value 0. Returns ``(cost, threshold, valid)``
    per column, where ``cost`` is the weighted child entropy (lower is a
    larger information gain); ties go to the smaller threshold.
    """
    k = len(hist)
    nz_hist = np.stack([np.bincount(col, weights=wvec[:, j], minlength=n_cols) for j in range(k)], axis=1)
    zero_hist = hist - nz_hist
    zcols = np.flatnonzero(zero_hist.sum(axis=1) > 0)
    all_col = np.concatenate([col, zcols])
    all_val = np.concatenate([val, np.zeros(len(zcols))])
    all_w = np.concatenate([wvec, zero_hist[zcols]])
    order = np.lexsort((all_val, all_col))
    all_col, all_val = all_col[order], all_val[order]
    cum = np.cumsum(all_w[order], axis=0)

    best_cost = np.full(n_cols, np.inf)
    thr = np.zeros(n_cols)
    valid = np.zeros(n_cols, dtype=bool)
    pos = np.flatnonzero((all_col[:-1] == all_col[1:]) & (all_val[:-1] < all_val[1:]))
    if len(pos) == 0:
        return best_cost, thr, valid
    # cumulative counts restart at each column
    first_of_col = np.searchsorted(all_col, all_col[pos], side="left")
    base = np.where(first_of_col[:, None] > 0, cum[np.maximum(first_of_col - 1, 0)], 0.0)
    left = cum[pos] - base
    cost = _weighted_entropy(left) + _weighted_entropy(hist - left)
    c = all_col[pos]
    # costs equal up to rounding count as ties, resolved by the smaller threshold
    colmin = np.full(n_cols, np.inf)
    np.minimum.at(colmin, c, cost)
    near = np.flatnonzero(cost <= colmin[c] + 1e-12 * max(1.0, float(hist.sum())))
    pick = near[np.lexsort((pos[near], c[near]))]
    first = pick[np.r_[True, c[pick][1:] != c[pick][:-1]]]
    cols, p = c[first], pos[first]
    best_cost[cols] = colmin[cols]
    thr[cols] = (all_val[p] + all_val[p + 1]) / 2.0
    valid[cols] = True
    return best_cost, thr, valid


def grow_tree(
    Xr: sp.csr_matrix,
    y: np.ndarray,
    weights: np.ndarray,
    n_classes: int,
    max_features: int,
    min_samples_split: int,
    rng: SplitMix64,
) -> Tree:
    indptr, indices, data = Xr.indptr, Xr.indices, Xr.data
    colmap = np.full(Xr.shape[1], -1, dtype=np.intp)
    feature, threshold, left, right, value = [], [], [], [], []
    root = np.flatnonzero(weights)
    stack = [(root, -1, False)]
    while stack:
        idx, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node
        w = weights[idx]
        yn = y[idx]
        hist = np.bincount(yn, weights=w, minlength=n_classes)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(hist)
        if np.count_nonzero(hist) <= 1 or hist.sum() < min_samples_split:
            continue

        # nonzero entries of the node's rows, without building a sparse slice
        starts, lengths = indptr[idx], indptr[idx + 1] - indptr[idx]
        total = int(lengths.sum())
        if total == 0:
            continue
        offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
        pos = offsets + np.arange(total)
        ent_row = np.repeat(np.arange(len(idx)), lengths)
        ent_col, ent_val = indices[pos], data[pos]

        present = np.unique(ent_col)
        candidates = present[rng.permutation(len(present))]
        best_cost, best_f, best_thr, best_col = np.inf, -1, 0.0, None
        n_valid, start = 0, 0
        while n_valid < max_features and start < len(candidates):
            chunk = candidates[start : start + max_features - n_valid]
            start += len(chunk)
            colmap[chunk] = np.arange(len(chunk))
            sel = colmap[ent_col]
            colmap[chunk] = -1
            hit = np.flatnonzero(sel >= 0)
            rows = ent_row[hit]
            wvec = np.zeros((len(hit), n_classes))
            wvec[np.arange(len(hit)), yn[rows]] = w[rows]
            cost, thr, ok = score_splits(sel[hit], ent_val[hit], wvec, len(chunk), hist)
            for j in range(len(chunk)):
                if not ok[j]:
                    continue
                n_valid += 1
                if cost[j] < best_cost:
                    best_cost, best_f, best_thr = cost[j], int(chunk[j]), float(thr[j])
                    mine = sel[hit] == j
                    best_col = np.zeros(len(idx))
                    best_col[rows[mine]] = ent_val[hit][mine]
                if n_valid == max_features:
                    break
        if best_f < 0:
            continue

        feature[node] = best_f
        threshold[node] = best_thr
        go_left = best_col <= best_thr
        stack.append((idx[~go_left], node, False))
        stack.append((idx[go_left], node, True))

    return Tree(
        np.asarray(feature, dtype=np.intp),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.intp),
        np.asarray(right, dtype=np.intp),
        np.asarray(value, dtype=np.float64).reshape(-1, n_classes),
    )


def resolve_max_features(rule, n_features: int) -> int:
    if rule is None:
        return n_features
    if rule == "sqrt":
        return max(1, math.isqrt(n_features))
    if rule == "log2":
        return max(1, n_features.bit_length() - 1)
    if isinstance(rule, int) and rule >= 1:
        return min(rule, n_features)
    raise ValueError(f"unsupported max_features {rule!r}")


class RandomForest(BaseClassifier):
    """Bagged entropy trees, probabilities averaged over trees.

    Parameters
    ----------
    n_estimators : int
    criterion : {"entropy"}
    random_state : int
        Tree ``t`` draws from a generator seeded with ``random_state + t``.
    max_features : "sqrt", "log2", int or None
        Valid candidate features examined per node (None: all).
    min_samples_split : int
        Nodes holding fewer bootstrap draws become leaves.
    bootstrap : bool
    """

    kind = "rf"

    def __init__(
        self,
        n_estimators: int = 400,
        criterion: str = "entropy",
        random_state: int = 42,
        max_features="sqrt",
        min_samples_split: int = 2,
        bootstrap: bool = True,
        n_classes: int | None = None,
    ):
        self.n_estimators = n_estimators
        self.criterion = criterion
        self.random_state = random_state
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.bootstrap = bootstrap
        self.n_classes = n_classes

    def _check_params(self):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if self.criterion != "entropy":
            raise ValueError("only the entropy criterion is implemented")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")

    def fit(self, X, y):
        self._check_params()
        X = as_matrix(X)
        X.sort_indices()
        y, k = check_labels(y, X.shape[0], self.n_classes)
        n, d = X.shape
        m = resolve_max_features(self.max_features, d)
        trees = []
        for t in range(self.n_estimators):
            rng = SplitMix64(self.random_state + t)
            if self.bootstrap:
                weights = np.bincount(rng.integers(n, n), minlength=n).astype(np.float64)
            else:
                weights = np.ones(n)
            trees.append(grow_tree(X, y, weights, k, m, self.min_samples_split, rng))
        self._set_classes(k, d)
        self.estimators_ = trees
        return self

    def _proba(self, X):
        out = np.zeros((X.shape[0], self.n_classes_))
        for start in range(0, X.shape[0], _PREDICT_CHUNK):
            dense = X[start : start + _PREDICT_CHUNK].toarray()
            acc = np.zeros((dense.shape[0], self.n_classes_))
            for tree in self.estimators_:
                acc += tree.leaf_proba(dense)
            out[start : start + dense.shape[0]] = acc / len(self.estimators_)
        return out

    @classmethod
    def from_trees(cls, trees: list[Tree], n_classes: int, n_features: int, **params) -> "RandomForest":
        model = cls(n_estimators=len(trees), **params)
        model._set_classes(n_classes, n_features)
        model.estimators_ = list(trees)
        return model


def train_rf(X, y, n_estimators: int = 400, seed: int = 42, max_features="sqrt", min_samples_split: int = 2) -> RandomForest:
    return RandomForest(
        n_estimators=n_estimators,
        random_state=seed,
        max_features=max_features,
        min_samples_split=min_samples_split,
    ).fit(X, y)
