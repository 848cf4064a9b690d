from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..ingest import Dataset, Label
from ..textprep import NormalizerConfig, preprocess


@dataclass(frozen=True)
class LabelStats:
    records: int
    total_tokens: int
    mean_tokens: float
    top_terms: tuple[tuple[str, int], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "records": self.records,
            "total_tokens": self.total_tokens,
            "mean_tokens": self.mean_tokens,
            "top_terms": [list(t) for t in self.top_terms],
        }


def error_listing(model, data: Dataset, X=None) -> list[tuple[str, Label, Label]]:
    """Misclassified records as ``(text, true, predicted)`` in data order.

    ``model`` predicts from raw texts (a full text pipeline) unless a
    feature matrix ``X`` aligned with ``data`` is given.
    """
    pred = model.predict(data.texts if X is None else X)
    return [
        (r.text, r.label, Label(int(p)))
        for r, p in zip(data.records, pred)
        if int(p) != int(r.label)
    ]


def _tokenize(d: Dataset, tokens, config) -> list[Sequence[str]]:
    if tokens is not None:
        tokens = list(tokens)
        if len(tokens) != len(d):
            raise ValueError("tokens must align with the dataset")
        return tokens
    return [preprocess(r.text, config).tokens for r in d.records]


def top_terms(docs: Sequence[Sequence[str]], k: int) -> tuple[tuple[str, int], ...]:
    counts = Counter(t for doc in docs for t in doc)
    return tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k])


def corpus_stats(
    d: Dataset,
    tokens: Sequence[Sequence[str]] | None = None,
    config: NormalizerConfig | None = None,
    top_k: int = 20,
) -> dict[Label, LabelStats]:
    """Per-label record count, token totals and most frequent terms.

    ``tokens`` are the preprocessed documents aligned with ``d``; when
    omitted they are computed with ``config``.
    """
    docs = _tokenize(d, tokens, config)
    groups: dict[Label, list] = {}
    for r, toks in zip(d.records, docs):
        if r.label is None:
            raise ValueError("corpus_stats needs labelled records")
        groups.setdefault(r.label, []).append(toks)
    out = {}
    for label in sorted(groups):
        g = groups[label]
        total = sum(len(t) for t in g)
        out[label] = LabelStats(len(g), total, total / len(g), top_terms(g, top_k))
    return out


def length_histogram(lengths: Sequence[int], bins: int = 10) -> list[tuple[int, int, int]]:
    """``(low, high, count)`` rows over integer token counts; ``high`` is inclusive."""
    lengths = np.asarray(lengths, dtype=np.int64)
    if len(lengths) == 0:
        return []
    hi = int(lengths.max())
    width = max(1, -(-(hi + 1) // bins))
    rows = []
    for lo in range(0, hi + 1, width):
        n = int(((lengths >= lo) & (lengths < lo + width)).sum())
        rows.append((lo, lo + width - 1, n))
    return rows
