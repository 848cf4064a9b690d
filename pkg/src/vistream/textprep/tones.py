"""Canonical tone-mark placement for Vietnamese syllables.

Social-media text mixes placements such as "qùa"/"quà" and "hoá"/"hóa".
Each syllable is reduced to (base letters, one tone) and the tone is put
back on the main vowel of the nucleus:

* a vowel carrying a quality mark (ă â ê ô ơ ư) takes the tone; with two
  such vowels ("ươ") the later one does;
* a single-vowel nucleus takes it;
* a nucleus followed by a final consonant puts it on its last vowel;
* an open two-vowel nucleus puts it on the first vowel ("hóa", "thủy"),
  an open three-vowel nucleus on the middle one ("ngoài", "khuỷu").

The "u" of "qu" and the "i" of "gi" (before another vowel) belong to the
onset. Tokens that do not parse as one syllable (including nuclei of
more than three vowels), or that carry more than one tone mark, are
returned unchanged.
"""

from __future__ import annotations

import unicodedata

# huyền, hỏi, ngã, sắc, nặng
TONE_MARKS = ("\u0300", "\u0309", "\u0303", "\u0301", "\u0323")
VOWELS = "aăâeêioôơuưy"
_QUALITY = set("ăâêôơư")

_SPLIT: dict[str, tuple[str, int]] = {}
_JOIN: dict[tuple[str, int], str] = {}
for _v in VOWELS:
    _SPLIT[_v] = (_v, 0)
    _JOIN[(_v, 0)] = _v
    for _t, _mark in enumerate(TONE_MARKS, 1):
        _c = unicodedata.normalize("NFC", _v + _mark)
        _SPLIT[_c] = (_v, _t)
        _JOIN[(_v, _t)] = _c
del _v, _t, _mark, _c


def _tone_target(bases: list[str]) -> int | None:
    vowel_at = [b in VOWELS for b in bases]
    if not any(vowel_at):
        return None
    start = vowel_at.index(True)
    nxt = start + 1
    if start > 0 and nxt < len(bases) and vowel_at[nxt]:
        onset_pair = bases[start - 1] + bases[start]
        if onset_pair in ("qu", "gi"):
            start = nxt
    end = start
    while end < len(bases) and vowel_at[end]:
        end += 1
    if any(vowel_at[end:]):
        return None
    nucleus = list(range(start, end))
    if len(nucleus) > 3:
        return None
    marked = [i for i in nucleus if bases[i] in _QUALITY]
    if marked:
        return marked[-1]
    if len(nucleus) == 1:
        return nucleus[0]
    if end < len(bases):
        return nucleus[-1]
    if len(nucleus) == 2:
        return nucleus[0]
    if len(nucleus) == 3:
        return nucleus[1]
    return None


def normalize_syllable(word: str) -> str:
    tones = [_SPLIT[c][1] for c in word if c in _SPLIT and _SPLIT[c][1]]
    if len(tones) != 1 or not word.isalpha():
        return word
    bases = [_SPLIT[c][0] if c in _SPLIT else c for c in word]
    target = _tone_target(bases)
    if target is None:
        return word
    tone = tones[0]
    return "".join(
        _JOIN[(b, tone if i == target else 0)] if b in VOWELS else b
        for i, b in enumerate(bases)
    )


def normalize_tones(text: str) -> str:
    """Relocate tone marks syllable by syllable; whitespace is preserved."""
    if not text:
        return text
    out = []
    word = []
    for ch in text:
        if ch.isspace():
            if word:
                out.append(normalize_syllable("".join(word)))
                word = []
            out.append(ch)
        else:
            word.append(ch)
    if word:
        out.append(normalize_syllable("".join(word)))
    return "".join(out)
