"""Generated three-class comment corpora for demos, benchmarks and tests.

Each comment mixes filler words shared by all classes with one or two
marker phrases owned by its class, plus optional surface noise (slang,
emoji, links, shouting) that preprocessing is expected to undo.
"""

from __future__ import annotations

from ._rng import SplitMix64
from .ingest import Dataset, Label, RawComment

FILLER = (
    "hôm", "qua", "mình", "thấy", "bài", "viết", "này", "rất", "là", "có", "những", "cái",
    "chuyện", "ai", "cũng", "biết", "đọc", "xong", "thì", "cứ", "nói", "vậy", "thôi",
    "trên", "mạng", "bình", "luận", "lại", "như", "vẫn", "đang", "sẽ", "đi", "làm",
)
MARKERS = {
    Label.OTHER: ("thời tiết", "bóng đá", "món ngon", "giá vàng", "xe buýt"),
    Label.DISCRIMINATION: ("bắc kỳ", "nam kỳ", "ba que", "dân tỉnh lẻ", "đồ nhà quê"),
    Label.SUPPORTIVE: ("một nhà", "đồng bào", "yêu thương", "đoàn kết", "chung tay"),
}
_NOISE = ("đc", "k", "ko", "😂", "!!!", "https://fb.com/p/123", "@ban", "...")


def make_corpus(
    n: int = 3000,
    seed: int = 0,
    weights: tuple[float, float, float] = (0.5, 0.3, 0.2),
    noise: float = 0.3,
    source: str = "synthetic",
) -> Dataset:
    """``n`` labelled comments with class proportions ``weights``.

    Labels are assigned deterministically by proportion, then the order is
    shuffled; every class receives at least one comment when ``n >= 3``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = SplitMix64(seed)
    total = sum(weights)
    counts = [int(n * w / total) for w in weights]
    counts[0] += n - sum(counts)
    labels = [lab for lab, c in zip(Label, counts) for _ in range(c)]
    rng.shuffle(labels)
    records = []
    for i, lab in enumerate(labels):
        words = [FILLER[rng.randbelow(len(FILLER))] for _ in range(3 + rng.randbelow(10))]
        markers = MARKERS[lab]
        for _ in range(1 + rng.randbelow(2)):
            words.insert(rng.randbelow(len(words) + 1), markers[rng.randbelow(len(markers))])
        if rng.randbelow(1000) < noise * 1000:
            words.insert(rng.randbelow(len(words) + 1), _NOISE[rng.randbelow(len(_NOISE))])
        text = " ".join(words)
        if rng.randbelow(10) == 0:
            text = text.upper()
        records.append(RawComment(f"s{i:05d}", text, lab, source))
    return Dataset(tuple(records))
