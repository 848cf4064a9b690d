"""Metrics, model selection and corpus analysis."""

from .analysis import LabelStats, corpus_stats, error_listing, length_histogram, top_terms
from .metrics import (
    ConfusionMatrix,
    EmptyEvaluationError,
    EvalReport,
    accuracy,
    confusion_matrix,
    evaluate,
    macro_f1,
    per_class_scores,
)
from .search import GridResult, grid_search, iter_grid, select_best

__all__ = [
    "ConfusionMatrix",
    "EmptyEvaluationError",
    "EvalReport",
    "GridResult",
    "LabelStats",
    "accuracy",
    "confusion_matrix",
    "corpus_stats",
    "error_listing",
    "evaluate",
    "grid_search",
    "iter_grid",
    "length_histogram",
    "macro_f1",
    "per_class_scores",
    "select_best",
    "top_terms",
]
