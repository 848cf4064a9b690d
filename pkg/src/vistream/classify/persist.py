"""Versioned JSON model files.

Layout: ``{"version": 1, "kind": "nb"|"lr"|"rf", "n_classes", "n_features",
"params", "payload"}``. Floats are written with ``repr`` precision, so a
loaded model predicts bit-identically to the saved one.
"""

from __future__ import annotations

import json
import os
import sys
from contextlib import contextmanager

import numpy as np

from .forest import RandomForest, Tree
from .logistic import SoftmaxRegression
from .naive_bayes import MultinomialNB

MODEL_VERSION = 1


class ModelFormatError(ValueError):
    pass


@contextmanager
def _deep_recursion(limit: int):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def _num(x: float):
    # counts are integral; keep them short in the file
    return int(x) if float(x).is_integer() and abs(x) < 2**53 else float(x)


def tree_to_nested(tree: Tree) -> dict:
    nodes = []
    for i in range(tree.n_nodes):
        if tree.feature[i] < 0:
            nodes.append({"value": [_num(v) for v in tree.value[i]]})
        else:
            nodes.append({"feature": int(tree.feature[i]), "threshold": float(tree.threshold[i])})
    for i in range(tree.n_nodes):
        if tree.feature[i] >= 0:
            nodes[i]["left"] = nodes[tree.left[i]]
            nodes[i]["right"] = nodes[tree.right[i]]
    return nodes[0]


def tree_from_nested(root: dict, n_classes: int) -> Tree:
    feature, threshold, left, right, value = [], [], [], [], []
    stack = [(root, -1, False)]
    while stack:
        obj, parent, is_left = stack.pop()
        i = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = i
        left.append(-1)
        right.append(-1)
        if "value" in obj:
            counts = [float(v) for v in obj["value"]]
            if len(counts) != n_classes:
                raise ModelFormatError("leaf histogram has the wrong number of classes")
            feature.append(-1)
            threshold.append(0.0)
            value.append(counts)
        else:
            feature.append(int(obj["feature"]))
            threshold.append(float(obj["threshold"]))
            value.append([0.0] * n_classes)
            stack.append((obj["right"], i, False))
            stack.append((obj["left"], i, True))
    return Tree(
        np.asarray(feature, dtype=np.intp),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.intp),
        np.asarray(right, dtype=np.intp),
        np.asarray(value, dtype=np.float64).reshape(-1, n_classes),
    )


def _tolist(a: np.ndarray) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


def model_to_dict(model) -> dict:
    if isinstance(model, MultinomialNB):
        payload = {
            "alpha": model.alpha,
            "class_log_prior": _tolist(model.class_log_prior_),
            "feature_log_prob": _tolist(model.feature_log_prob_),
        }
    elif isinstance(model, SoftmaxRegression):
        payload = {
            "l2": model.l2,
            "weights": _tolist(model.coef_),
            "bias": _tolist(model.intercept_),
            "report": {
                "iterations": model.n_iter_,
                "grad_norm": model.grad_norm_,
                "stop_reason": model.stop_reason_,
            },
        }
    elif isinstance(model, RandomForest):
        payload = {
            "config": {
                "n_estimators": model.n_estimators,
                "criterion": model.criterion,
                "seed": model.random_state,
                "max_features": model.max_features,
                "min_samples_split": model.min_samples_split,
                "bootstrap": model.bootstrap,
            },
            "trees": [tree_to_nested(t) for t in model.estimators_],
        }
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    return {
        "version": MODEL_VERSION,
        "kind": model.kind,
        "n_classes": int(model.n_classes_),
        "n_features": int(model.n_features_in_),
        "payload": payload,
    }


def model_from_dict(obj: dict):
    if not isinstance(obj, dict):
        raise ModelFormatError("model file must hold a JSON object")
    if obj.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {obj.get('version')!r}")
    try:
        kind, k, d, p = obj["kind"], int(obj["n_classes"]), int(obj["n_features"]), obj["payload"]
        if kind == "nb":
            model = MultinomialNB(alpha=p["alpha"])
            model.class_log_prior_ = np.asarray(p["class_log_prior"], dtype=np.float64)
            model.feature_log_prob_ = np.asarray(p["feature_log_prob"], dtype=np.float64).reshape(k, d)
        elif kind == "lr":
            model = SoftmaxRegression(l2=p.get("l2"))
            model.coef_ = np.asarray(p["weights"], dtype=np.float64).reshape(k, d)
            model.intercept_ = np.asarray(p["bias"], dtype=np.float64).reshape(k)
            rep = p.get("report", {})
            model.n_iter_ = rep.get("iterations")
            model.grad_norm_ = rep.get("grad_norm")
            model.stop_reason_ = rep.get("stop_reason")
        elif kind == "rf":
            cfg = p["config"]
            trees = [tree_from_nested(t, k) for t in p["trees"]]
            model = RandomForest.from_trees(
                trees,
                k,
                d,
                criterion=cfg["criterion"],
                random_state=cfg["seed"],
                max_features=cfg["max_features"],
                min_samples_split=cfg["min_samples_split"],
                bootstrap=cfg["bootstrap"],
            )
        else:
            raise ModelFormatError(f"unknown model kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed model payload: {exc}") from exc
    model._set_classes(k, d)
    return model


def dumps_model(model) -> str:
    obj = model_to_dict(model)
    depth = max((t.depth() for t in getattr(model, "estimators_", [])), default=0)
    with _deep_recursion(4 * depth + 1000):
        return json.dumps(obj, separators=(",", ":"))


def loads_model(text: str):
    try:
        with _deep_recursion(200_000):
            obj = json.loads(text)
    except (json.JSONDecodeError, RecursionError) as exc:
        raise ModelFormatError(f"unreadable model file: {exc}") from exc
    return model_from_dict(obj)


def save_model(model, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path: str | os.PathLike):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"model file is not UTF-8: {exc}") from exc
    return loads_model(text)
