from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from types import MappingProxyType
from typing import Iterable, Mapping

from sklearn.base import BaseEstimator, TransformerMixin

from .stages import clean, decode_teencode, lowercase, normalize_unicode, segment_words
from .tones import normalize_tones


def _canonical(s: str) -> str:
    return normalize_tones(normalize_unicode(s.lower()))


def _data_lines(path: str | os.PathLike | None, default: str) -> list[str]:
    if path is None:
        text = resources.files(__package__).joinpath("data", default).read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def load_teencode(path: str | os.PathLike | None = None) -> dict[str, str]:
    """Read a tab-separated ``key<TAB>replacement`` file (packaged default if None)."""
    mapping = {}
    for ln in _data_lines(path, "teencode.tsv"):
        key, sep, value = ln.partition("\t")
        if not sep or not value.strip():
            raise ValueError(f"malformed teencode line: {ln!r}")
        mapping[normalize_unicode(key.strip())] = " ".join(_canonical(value).split())
    return mapping


def load_lexicon(path: str | os.PathLike | None = None) -> frozenset[str]:
    return frozenset(" ".join(_canonical(ln).split()) for ln in _data_lines(path, "phrases.txt"))


@dataclass(frozen=True)
class NormalizerConfig:
    """Dictionaries and stage switches for :func:`preprocess`.

    ``NormalizerConfig()`` loads the packaged dictionaries.
    """

    teencode_map: Mapping[str, str] = field(default_factory=load_teencode)
    phrase_lexicon: frozenset[str] = field(default_factory=load_lexicon)
    lowercase: bool = True
    normalize_unicode: bool = True
    clean: bool = True
    decode_teencode: bool = True
    normalize_tones: bool = True
    segment: bool = True

    def __post_init__(self):
        for key in self.teencode_map:
            if key != key.lower() or not key or any(c.isspace() for c in key):
                raise ValueError(f"teencode key {key!r} must be lowercase and whitespace-free")
        lexicon = frozenset(self.phrase_lexicon)
        for phrase in lexicon:
            if len(phrase.split()) < 2:
                raise ValueError(f"lexicon entry {phrase!r} needs at least two syllables")
        object.__setattr__(self, "teencode_map", MappingProxyType(dict(self.teencode_map)))
        object.__setattr__(self, "phrase_lexicon", lexicon)
        # split once here rather than on every segment_words call
        object.__setattr__(self, "_phrases", frozenset(tuple(p.split()) for p in lexicon))

    @classmethod
    def from_files(cls, teencode_path=None, lexicon_path=None, **stages) -> "NormalizerConfig":
        return cls(load_teencode(teencode_path), load_lexicon(lexicon_path), **stages)


@dataclass(frozen=True)
class ProcessedText:
    tokens: tuple[str, ...]
    source_id: str = ""

    @property
    def empty(self) -> bool:
        return not self.tokens

    def __str__(self) -> str:
        return " ".join(self.tokens)


_DEFAULT: NormalizerConfig | None = None


def default_config() -> NormalizerConfig:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = NormalizerConfig()
    return _DEFAULT


def preprocess(text: str, config: NormalizerConfig | None = None, source_id: str = "") -> ProcessedText:
    """Run the full normalisation chain and return word tokens.

    Order: lowercase, NFC, clean, teencode, tone placement, segmentation.
    Disabled stages are skipped; with segmentation off the text is split on
    whitespace.
    """
    cfg = config or default_config()
    if cfg.lowercase:
        text = lowercase(text)
    if cfg.normalize_unicode:
        text = normalize_unicode(text)
    if cfg.clean:
        text = clean(text)
    if cfg.decode_teencode:
        text = decode_teencode(text, cfg.teencode_map)
    if cfg.normalize_tones:
        text = normalize_tones(text)
    if cfg.segment:
        tokens = segment_words(text, cfg._phrases)
    else:
        tokens = text.split()
    return ProcessedText(tuple(tokens), source_id)


class TextNormalizer(BaseEstimator, TransformerMixin):
    """Stateless transformer turning raw comments into token lists.

    Parameters
    ----------
    config : NormalizerConfig, optional
        Dictionaries and stage switches; the packaged defaults when None.
    """

    def __init__(self, config: NormalizerConfig | None = None):
        self.config = config

    def fit(self, X, y=None):
        return self

    def transform(self, X: Iterable[str]) -> list[list[str]]:
        cfg = self.config or default_config()
        return [list(preprocess(t, cfg).tokens) for t in X]

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        tags.input_tags.string = True
        tags.input_tags.two_d_array = False
        return tags
