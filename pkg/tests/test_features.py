import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vistream.features import (
    CountVectorizer,
    EmptyVocabularyError,
    SparseVector,
    VectorizerConfig,
    Vocabulary,
    fit_transform,
    fit_vocabulary,
    from_row,
    to_csr,
    transform,
)
from vistream.textprep import ProcessedText

CORPUS = [["a", "b", "a"], ["b", "c"]]


def naive_vocab(corpus, min_df, max_features):
    """Enumerate every admissible term set and pick the one the rules demand."""
    terms = sorted({t for d in corpus for t in d})
    df = {t: sum(t in d for d in corpus) for t in terms}
    tf = {t: sum(d.count(t) for d in corpus) for t in terms}
    eligible = [t for t in terms if df[t] >= min_df]
    if max_features is None or len(eligible) <= max_features:
        return eligible
    best = None
    for combo in itertools.combinations(eligible, max_features):
        key = sorted(((-tf[t], t) for t in combo))
        if best is None or key < best[0]:
            best = (key, combo)
    return sorted(best[1])


def test_vocab_example():
    v = fit_vocabulary(CORPUS)
    assert v.term_index == {"a": 0, "b": 1, "c": 2}
    assert v.doc_freq == (1, 2, 1)


def test_vocab_min_df():
    assert fit_vocabulary(CORPUS, VectorizerConfig(min_df=2)).term_index == {"b": 0}


def test_vocab_max_features_tie_break():
    # a and b both occur twice; c once. Keeping 1 term picks "a".
    assert fit_vocabulary(CORPUS, VectorizerConfig(max_features=1)).terms == ("a",)


def test_vocab_empty():
    with pytest.raises(EmptyVocabularyError):
        fit_vocabulary([[]])
    with pytest.raises(ValueError):
        fit_vocabulary([])


@pytest.mark.parametrize("kwargs", [{"min_df": 0}, {"max_features": 0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        VectorizerConfig(**kwargs)


def test_transform_examples():
    v = fit_vocabulary(CORPUS)
    assert transform(["a", "b", "a"], v) == SparseVector(3, ((0, 2), (1, 1)))
    assert transform([], v) == SparseVector(3, ())
    assert transform(["zzz", "q"], v).entries == ()


def test_transform_accepts_processed_text():
    v = fit_vocabulary([ProcessedText(("x", "y"))])
    assert transform(ProcessedText(("y", "y")), v).entries == ((1, 2),)


def test_fit_transform_example():
    v, vecs = fit_transform([["a"], ["a"]])
    assert v.term_index == {"a": 0}
    assert vecs == [SparseVector(1, ((0, 1),)), SparseVector(1, ((0, 1),))]


def test_sparse_vector_validation():
    with pytest.raises(ValueError):
        SparseVector(3, ((1, 1), (0, 1)))
    with pytest.raises(ValueError):
        SparseVector(3, ((3, 1),))
    with pytest.raises(ValueError):
        SparseVector(3, ((0, 0),))


def test_vocabulary_requires_sorted_terms():
    with pytest.raises(ValueError):
        Vocabulary(("b", "a"))


def test_vocabulary_json_round_trip(tmp_path):
    v = fit_vocabulary([["việt_nam", "đồng_bào", "a"]], VectorizerConfig(1, 5))
    v.save(tmp_path / "v.json")
    back = Vocabulary.load(tmp_path / "v.json")
    assert back == v and back.term_index == v.term_index
    assert "việt_nam" in (tmp_path / "v.json").read_text(encoding="utf-8")


@pytest.mark.parametrize("text", ['{"version": 2, "terms": []}', "{", '{"version": 1}'])
def test_vocabulary_bad_json(text):
    with pytest.raises(ValueError):
        Vocabulary.from_json(text)


def test_csr_round_trip():
    v, vecs = fit_transform(CORPUS)
    X = to_csr(vecs)
    assert X.toarray().tolist() == [[2, 1, 0], [0, 1, 1]]
    assert [from_row(X, i) for i in range(2)] == vecs
    assert to_csr([], 4).shape == (0, 4)


def test_count_vectorizer_estimator():
    est = CountVectorizer(min_df=1)
    X = est.fit_transform(CORPUS)
    assert X.shape == (2, 3)
    assert list(est.get_feature_names_out()) == ["a", "b", "c"]
    assert est.get_params() == {"min_df": 1, "max_features": None, "vocabulary": None}


tokens = st.lists(st.lists(st.sampled_from(list("abcdef") + ["việt", "nam"]), max_size=6), min_size=1, max_size=6)


@settings(max_examples=200, deadline=None)
@given(tokens, st.integers(1, 3), st.one_of(st.none(), st.integers(1, 4)))
def test_vocab_matches_enumeration(corpus, min_df, max_features):
    expected = naive_vocab(corpus, min_df, max_features)
    if not expected:
        with pytest.raises(EmptyVocabularyError):
            fit_vocabulary(corpus, VectorizerConfig(min_df, max_features))
        return
    v = fit_vocabulary(corpus, VectorizerConfig(min_df, max_features))
    assert list(v.terms) == expected
    assert list(v.term_index.values()) == list(range(len(expected)))
    assert fit_vocabulary(corpus, VectorizerConfig(min_df, max_features)) == v


@settings(max_examples=200, deadline=None)
@given(tokens, tokens)
def test_transform_matches_tally(train, docs):
    if not any(train):
        return
    v = fit_vocabulary(train)
    for doc in docs:
        vec = transform(doc, v)
        dense = vec.to_dense()
        for t, i in v.term_index.items():
            assert dense[i] == doc.count(t)
        oov = sum(t not in v.term_index for t in doc)
        assert vec.total() == len(doc) - oov


@settings(max_examples=100, deadline=None)
@given(tokens)
def test_fit_transform_consistent(corpus):
    if not any(corpus):
        return
    v, vecs = fit_transform(corpus)
    assert len(vecs) == len(corpus)
    assert vecs == [transform(d, v) for d in corpus]
    assert np.array_equal(to_csr(vecs).toarray(), np.array([x.to_dense() for x in vecs]))
