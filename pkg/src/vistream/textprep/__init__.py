"""Vietnamese comment normalisation."""

from .pipeline import (
    NormalizerConfig,
    ProcessedText,
    TextNormalizer,
    default_config,
    load_lexicon,
    load_teencode,
    preprocess,
)
from .stages import clean, decode_teencode, lowercase, normalize_unicode, segment_words
from .tones import normalize_tones

__all__ = [
    "NormalizerConfig",
    "ProcessedText",
    "TextNormalizer",
    "clean",
    "decode_teencode",
    "default_config",
    "load_lexicon",
    "load_teencode",
    "lowercase",
    "normalize_tones",
    "normalize_unicode",
    "preprocess",
    "segment_words",
]
