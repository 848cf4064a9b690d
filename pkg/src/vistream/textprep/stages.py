"""Individual text-cleaning stages. Each takes and returns a plain string."""

from __future__ import annotations

import re
import unicodedata
from functools import lru_cache
from typing import Collection, Mapping

from .tones import normalize_tones

_URL = re.compile(r"(?i)\b[a-z][a-z0-9+.\-]*://\S*|\bwww\.\S*")
_MENTION = re.compile(r"@\w+")
_EMOJI = re.compile(
    "["
    "\U0001F000-\U0001FAFF"  # mahjong .. symbols & pictographs ext-A
    "\u2600-\u27BF"  # misc symbols, dingbats
    "\u2B00-\u2BFF"
    "\u2300-\u23FF"
    "\uFE0E\uFE0F"  # variation selectors
    "\u200D"  # zero-width joiner
    "\u20E3"  # keycap
    "\U000E0020-\U000E007F"  # tag sequences
    "]"
)
# three or more of the same letter; combining marks ride along with their base
_REPEAT = re.compile("([^\\W\\d_][\u0300-\u036F]*)\\1{2,}")
_SPACE = re.compile(r"\s+")


def lowercase(text: str) -> str:
    return text.lower()


def normalize_unicode(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@lru_cache(maxsize=65536)
def _is_strippable(ch: str) -> bool:
    if ch == "_":
        return False
    cat = unicodedata.category(ch)
    return cat[0] in "PS" or cat in ("Cc", "Cf", "Co", "Cs")


def strip_punctuation(text: str) -> str:
    """Replace punctuation/symbol characters (except ``_``) by spaces."""
    return "".join(" " if _is_strippable(ch) else ch for ch in text)


def clean(text: str) -> str:
    """Drop links, @-mentions, emoji and punctuation; squeeze repeats and spaces.

    Removed spans become spaces so neighbouring words never fuse.
    """
    text = _URL.sub(" ", text)
    text = _MENTION.sub(" ", text)
    text = _EMOJI.sub(" ", text)
    text = strip_punctuation(text)
    text = _REPEAT.sub(r"\1", text)
    return _SPACE.sub(" ", text).strip()


def decode_teencode(text: str, mapping: Mapping[str, str]) -> str:
    """Whole-token replacement of slang and abbreviations.

    A token also matches when its canonical tone placement equals a key, so
    spelling variants such as "hoá"/"hóa" hit the same entry.
    """
    out = []
    for tok in text.split():
        rep = mapping.get(tok)
        if rep is None:
            rep = mapping.get(normalize_tones(tok), tok)
        out.append(rep)
    return " ".join(out)


def segment_words(text: str, lexicon: Collection[str] | Collection[tuple[str, ...]]) -> list[str]:
    """Greedy longest-match grouping of syllables into lexicon phrases."""
    syllables = text.split()
    if not syllables:
        return []
    phrases = {p if isinstance(p, tuple) else tuple(p.split()) for p in lexicon}
    longest = max((len(p) for p in phrases), default=0)
    tokens = []
    i = 0
    while i < len(syllables):
        for n in range(min(longest, len(syllables) - i), 1, -1):
            if tuple(syllables[i : i + n]) in phrases:
                tokens.append("_".join(syllables[i : i + n]))
                i += n
                break
        else:
            tokens.append(syllables[i])
            i += 1
    return tokens
