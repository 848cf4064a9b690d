"""Bag-of-words counts over preprocessed tokens."""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .textprep import ProcessedText

VOCAB_VERSION = 1


class EmptyVocabularyError(ValueError):
    pass


@dataclass(frozen=True)
class VectorizerConfig:
    min_df: int = 1
    max_features: int | None = None

    def __post_init__(self):
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError("max_features must be >= 1")


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_freq: tuple[int, ...] = ()
    min_df: int = 1
    max_features: int | None = None
    term_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary terms must be unique and sorted")
        object.__setattr__(self, "term_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def to_json(self) -> str:
        return json.dumps(
            {
                "version": VOCAB_VERSION,
                "min_df": self.min_df,
                "max_features": self.max_features,
                "terms": list(self.terms),
                "doc_freq": list(self.doc_freq),
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        try:
            obj = json.loads(text)
            if obj.get("version") != VOCAB_VERSION:
                raise ValueError(f"unsupported vocabulary version {obj.get('version')!r}")
            return cls(
                tuple(obj["terms"]),
                tuple(obj.get("doc_freq", ())),
                obj.get("min_df", 1),
                obj.get("max_features"),
            )
        except (KeyError, TypeError, AttributeError, json.JSONDecodeError) as exc:
            raise ValueError(f"malformed vocabulary file: {exc}") from exc

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class SparseVector:
    dims: int
    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = -1
        for i, c in self.entries:
            if not prev < i < self.dims or c < 1:
                raise ValueError("entries must have strictly increasing in-range indices and counts >= 1")
            prev = i

    def total(self) -> int:
        return sum(c for _, c in self.entries)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dims, dtype=np.float64)
        for i, c in self.entries:
            out[i] = c
        return out


def _tokens(doc) -> Sequence[str]:
    return doc.tokens if isinstance(doc, ProcessedText) else doc


def fit_vocabulary(corpus: Iterable, config: VectorizerConfig | None = None) -> Vocabulary:
    """Terms with document frequency >= ``min_df``, optionally capped at the
    ``max_features`` most frequent (ties go to the lexicographically smaller
    term). Indices follow lexicographic term order."""
    config = config or VectorizerConfig()
    df: Counter = Counter()
    tf: Counter = Counter()
    n_docs = 0
    for doc in corpus:
        toks = _tokens(doc)
        n_docs += 1
        tf.update(toks)
        df.update(set(toks))
    if n_docs == 0:
        raise ValueError("corpus is empty")
    kept = [t for t, n in df.items() if n >= config.min_df]
    if config.max_features is not None and len(kept) > config.max_features:
        kept.sort(key=lambda t: (-tf[t], t))
        kept = kept[: config.max_features]
    if not kept:
        raise EmptyVocabularyError("no term satisfies the vocabulary constraints")
    terms = tuple(sorted(kept))
    return Vocabulary(terms, tuple(df[t] for t in terms), config.min_df, config.max_features)


def transform(doc, vocab: Vocabulary) -> SparseVector:
    index = vocab.term_index
    counts = Counter(index[t] for t in _tokens(doc) if t in index)
    return SparseVector(len(vocab), tuple(sorted(counts.items())))


def fit_transform(corpus, config: VectorizerConfig | None = None) -> tuple[Vocabulary, list[SparseVector]]:
    corpus = list(corpus)
    vocab = fit_vocabulary(corpus, config)
    return vocab, [transform(doc, vocab) for doc in corpus]


def to_csr(vectors: Sequence[SparseVector], dims: int | None = None) -> sp.csr_matrix:
    """Stack sparse vectors into a CSR count matrix."""
    if dims is None:
        if not vectors:
            raise ValueError("dims required for an empty batch")
        dims = vectors[0].dims
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        if v.dims != dims:
            raise ValueError(f"vector has {v.dims} dims, expected {dims}")
        for i, c in v.entries:
            indices.append(i)
            data.append(c)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int32), np.asarray(indptr)),
        shape=(len(vectors), dims),
    )


def from_row(X, i: int) -> SparseVector:
    row = sp.csr_matrix(X[i])
    row.sort_indices()
    return SparseVector(row.shape[1], tuple((int(j), int(c)) for j, c in zip(row.indices, row.data) if c))


class CountVectorizer(BaseEstimator, TransformerMixin):
    """Token lists in, CSR count matrix out.

    Accepts lists of tokens or :class:`ProcessedText` objects, so it slots in
    after :class:`~vistream.textprep.TextNormalizer` in a pipeline.
    """

    def __init__(self, min_df: int = 1, max_features: int | None = None, vocabulary: Vocabulary | None = None):
        self.min_df = min_df
        self.max_features = max_features
        self.vocabulary = vocabulary

    def fit(self, X, y=None):
        if self.vocabulary is not None:
            self.vocabulary_ = self.vocabulary
        else:
            self.vocabulary_ = fit_vocabulary(X, VectorizerConfig(self.min_df, self.max_features))
        return self

    def transform(self, X) -> sp.csr_matrix:
        check_is_fitted(self, "vocabulary_")
        return to_csr([transform(doc, self.vocabulary_) for doc in X], len(self.vocabulary_))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        return np.asarray(self.vocabulary_.terms, dtype=object)
