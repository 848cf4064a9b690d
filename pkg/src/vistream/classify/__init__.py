"""Classical text classifiers: naive Bayes, softmax regression, random forest."""

from ._base import BaseClassifier, Prediction, ShapeError, TrainingError, as_matrix, predict, predict_batch
from .forest import RandomForest, Tree, train_rf
from .logistic import DivergenceError, SoftmaxRegression, softmax_loss_grad, train_lr
from .naive_bayes import MultinomialNB, train_nb
from .persist import ModelFormatError, dumps_model, load_model, loads_model, save_model

MODEL_KINDS = {"nb": MultinomialNB, "lr": SoftmaxRegression, "rf": RandomForest}


def make_model(kind: str, **params) -> BaseClassifier:
    try:
        cls = MODEL_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown model kind {kind!r}; choose from {sorted(MODEL_KINDS)}") from None
    return cls(**params)


__all__ = [
    "BaseClassifier",
    "DivergenceError",
    "MODEL_KINDS",
    "ModelFormatError",
    "MultinomialNB",
    "Prediction",
    "RandomForest",
    "ShapeError",
    "SoftmaxRegression",
    "TrainingError",
    "Tree",
    "as_matrix",
    "dumps_model",
    "load_model",
    "loads_model",
    "make_model",
    "predict",
    "predict_batch",
    "save_model",
    "softmax_loss_grad",
    "train_lr",
    "train_nb",
    "train_rf",
]
