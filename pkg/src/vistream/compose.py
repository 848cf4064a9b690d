"""Raw-text classifiers assembled from the package's estimators."""

from __future__ import annotations

from sklearn.pipeline import Pipeline

from .features import CountVectorizer, Vocabulary
from .textprep import NormalizerConfig, TextNormalizer


def make_text_classifier(model, vocabulary: Vocabulary | None = None, config: NormalizerConfig | None = None) -> Pipeline:
    """Pipeline ``normalize -> vectorize -> classify`` over raw comment strings.

    With a fitted ``model`` and its ``vocabulary`` the pipeline is usable
    for prediction straight away; otherwise call ``fit(texts, y)``.
    """
    vectorizer = CountVectorizer(vocabulary=vocabulary)
    if vocabulary is not None:
        vectorizer.fit(None)
    return Pipeline(
        [
            ("normalize", TextNormalizer(config)),
            ("vectorize", vectorizer),
            ("classify", model),
        ]
    )
