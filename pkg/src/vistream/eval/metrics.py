from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from ..ingest import N_CLASSES, Label


class EmptyEvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true labels, columns predicted labels."""

    counts: np.ndarray

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        names = _class_names(self.n_classes)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["true\\pred", *names])
        for name, row in zip(names, self.counts):
            writer.writerow([name, *(int(c) for c in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ConfusionMatrix":
        rows = list(csv.reader(io.StringIO(text)))[1:]
        return cls(np.array([[int(c) for c in r[1:]] for r in rows], dtype=np.int64))


def _class_names(k: int) -> list[str]:
    return [Label(i).name.lower() if i < N_CLASSES else f"class_{i}" for i in range(k)]


def confusion_matrix(y_true, y_pred, n_classes: int | None = None) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.intp)
    y_pred = np.asarray(y_pred, dtype=np.intp)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if len(y_true) == 0:
        raise EmptyEvaluationError("nothing to evaluate")
    k = n_classes or max(N_CLASSES, int(max(y_true.max(), y_pred.max())) + 1)
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise EmptyEvaluationError("empty confusion matrix")
    return float(np.trace(cm.counts)) / cm.total


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 is defined as 0
    out = np.zeros(len(num))
    np.divide(num, den, out=out, where=den > 0)
    return out


def per_class_scores(cm: ConfusionMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Precision, recall and F1 for every class."""
    tp = np.diag(cm.counts).astype(np.float64)
    precision = _ratio(tp, cm.counts.sum(axis=0).astype(np.float64))
    recall = _ratio(tp, cm.counts.sum(axis=1).astype(np.float64))
    f1 = _ratio(2 * precision * recall, precision + recall)
    return precision, recall, f1


def macro_f1(cm: ConfusionMatrix) -> float:
    if cm.total == 0:
        raise EmptyEvaluationError("empty confusion matrix")
    return float(np.mean(per_class_scores(cm)[2]))


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    macro_f1: float
    confusion: ConfusionMatrix

    @classmethod
    def from_confusion(cls, cm: ConfusionMatrix) -> "EvalReport":
        p, r, f = per_class_scores(cm)
        return cls(accuracy(cm), tuple(p.tolist()), tuple(r.tolist()), tuple(f.tolist()), macro_f1(cm), cm)

    def to_dict(self) -> dict:
        names = _class_names(self.confusion.n_classes)
        return {
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "n_samples": self.confusion.total,
            "per_class": {
                name: {"precision": p, "recall": r, "f1": f, "support": int(s)}
                for name, p, r, f, s in zip(
                    names, self.precision, self.recall, self.f1, self.confusion.counts.sum(axis=1)
                )
            },
            "confusion": self.confusion.counts.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        names = _class_names(self.confusion.n_classes)
        width = max(len(n) for n in names) + 2
        lines = [f"{'class':<{width}}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"]
        support = self.confusion.counts.sum(axis=1)
        for name, p, r, f, s in zip(names, self.precision, self.recall, self.f1, support):
            lines.append(f"{name:<{width}}{p:>10.4f}{r:>10.4f}{f:>10.4f}{int(s):>10d}")
        lines.append("")
        lines.append(f"{'accuracy':<{width}}{self.accuracy:>10.4f}")
        lines.append(f"{'macro f1':<{width}}{self.macro_f1:>10.4f}")
        return "\n".join(lines)


def evaluate(y_true, y_pred, n_classes: int | None = None) -> EvalReport:
    return EvalReport.from_confusion(confusion_matrix(y_true, y_pred, n_classes))
